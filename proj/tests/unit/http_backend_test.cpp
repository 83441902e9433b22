#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "httplib.h"
#include "synworld/error.hpp"
#include "synworld/http_backend.hpp"
#include "synworld/json_io.hpp"

using namespace synworld;

namespace {

// Local chat-completions stub answering with a scripted status sequence.
class StubServer {
 public:
  explicit StubServer(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::size_t i = calls_++;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      int status = statuses_[std::min(i, statuses_.size() - 1)];
      res.status = status;
      if (status == 200) {
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"pong"}}]})", "application/json");
      } else {
        res.set_content("{\"error\":\"busy\"}", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::size_t calls() const { return calls_; }
  std::string last_body_;
  std::string last_auth_;

 private:
  std::vector<int> statuses_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> calls_{0};
};

HttpBackendConfig config_for(const StubServer& server) {
  HttpBackendConfig c;
  c.base_url = server.url();
  c.api_key = "test-key";
  c.model = "stub-model";
  c.base_delay = std::chrono::milliseconds(100);
  c.timeout = std::chrono::seconds(5);
  return c;
}

}  // namespace

TEST(HttpBackend, RetriesRateLimitsThenSucceeds) {
  StubServer server({429, 429, 200});
  std::vector<std::chrono::milliseconds> sleeps;
  HttpBackend llm(config_for(server), [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  EXPECT_EQ(llm.complete(ChatRequest::single("ping", "sys", 0.3)), "pong");
  EXPECT_EQ(server.calls(), 3u);

  auto log = llm.attempt_log();
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log[0].status, 429);
  EXPECT_TRUE(log[2].success);
  ASSERT_EQ(sleeps.size(), 2u);
  // base * 2^n plus jitter of at most half of that.
  EXPECT_GE(sleeps[0].count(), 100);
  EXPECT_LE(sleeps[0].count(), 150);
  EXPECT_GE(sleeps[1].count(), 200);
  EXPECT_LE(sleeps[1].count(), 300);

  auto body = Json::parse(server.last_body_);
  EXPECT_EQ(body["model"], "stub-model");
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["content"], "ping");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.3);
  EXPECT_EQ(server.last_auth_, "Bearer test-key");
}

TEST(HttpBackend, GivesUpAfterMaxRetries) {
  StubServer server({503});
  int sleeps = 0;
  HttpBackend llm(config_for(server), [&](std::chrono::milliseconds) { ++sleeps; });
  try {
    llm.complete(ChatRequest::single("ping"));
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.status(), 503);
    EXPECT_NE(e.body_excerpt().find("busy"), std::string::npos);
  }
  EXPECT_EQ(server.calls(), 4u);
  EXPECT_EQ(sleeps, 3);
}

TEST(HttpBackend, ClientErrorsAreNotRetried) {
  StubServer server({400, 200});
  HttpBackend llm(config_for(server), [](std::chrono::milliseconds) {});
  EXPECT_THROW(llm.complete(ChatRequest::single("ping")), TransportError);
  EXPECT_EQ(server.calls(), 1u);
}

TEST(HttpBackend, JitterIsSeeded) {
  auto run = [](std::uint64_t seed) {
    StubServer server({500, 500, 200});
    auto c = config_for(server);
    c.jitter_seed = seed;
    std::vector<long> delays;
    HttpBackend llm(c, [&](std::chrono::milliseconds d) { delays.push_back(d.count()); });
    llm.complete(ChatRequest::single("ping"));
    return delays;
  };
  EXPECT_EQ(run(9), run(9));
}

TEST(HttpBackend, RetryableStatuses) {
  for (int s : {0, 408, 429, 500, 502, 599}) EXPECT_TRUE(HttpBackend::is_retryable_status(s)) << s;
  for (int s : {200, 400, 401, 404, 422}) EXPECT_FALSE(HttpBackend::is_retryable_status(s)) << s;
}

TEST(HttpBackend, RejectsUrlWithoutScheme) {
  HttpBackendConfig c;
  c.base_url = "localhost:8080";
  EXPECT_THROW(HttpBackend{c}, ConfigError);
}
