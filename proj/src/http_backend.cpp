#include "synworld/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "synworld/error.hpp"
#include "synworld/json_io.hpp"

namespace synworld {

namespace {

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

Json request_body(const ChatRequest& request, const std::string& default_model) {
  Json messages = Json::array();
  for (const auto& m : request.messages)
    messages.push_back(Json{{"role", std::string(to_string(m.role))}, {"content", m.content}});
  return Json{{"model", request.model.empty() ? default_model : request.model},
              {"messages", messages},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens}};
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)), jitter_rng_(config_.jitter_seed) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (config_.api_key.empty()) {
    if (const char* env = std::getenv(kApiKeyEnv)) config_.api_key = env;
  }
  if (config_.max_retries < 0) throw ConfigError("max_retries must be >= 0");

  const std::string& url = config_.base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url lacks a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/chat/completions";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.rfind("https://", 0) == 0) throw ConfigError("built without TLS support: " + url);
#endif
}

bool HttpBackend::is_retryable_status(int status) {
  return status == 0 || status == 408 || status == 429 || (status >= 500 && status <= 599);
}

std::chrono::milliseconds HttpBackend::backoff(int retry_index) {
  auto delay = config_.base_delay * (std::int64_t{1} << retry_index);
  std::int64_t half = delay.count() / 2;
  std::int64_t jitter = half > 0 ? static_cast<std::int64_t>(jitter_rng_() % static_cast<std::uint64_t>(half + 1)) : 0;
  return delay + std::chrono::milliseconds(jitter);
}

std::string HttpBackend::complete(const ChatRequest& request) {
  validate_request(request);
  const std::string body = request_body(request, config_.model).dump();

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  int last_status = 0;
  std::string last_body;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    auto result = client.Post(path_, headers, body, "application/json");
    last_status = result ? result->status : 0;
    last_body = result ? result->body : httplib::to_string(result.error());

    if (result && result->status >= 200 && result->status < 300) {
      try {
        Json parsed = Json::parse(result->body);
        std::string content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        std::lock_guard lock(mutex_);
        attempts_.push_back({attempt + 1, last_status, true, {}});
        return content;
      } catch (const std::exception&) {
        std::lock_guard lock(mutex_);
        attempts_.push_back({attempt + 1, last_status, false, {}});
        throw TransportError("malformed chat-completions response", last_status, excerpt(last_body));
      }
    }

    const bool retry = is_retryable_status(last_status) && attempt < config_.max_retries;
    std::chrono::milliseconds delay{0};
    {
      std::lock_guard lock(mutex_);
      if (retry) delay = backoff(attempt);
      attempts_.push_back({attempt + 1, last_status, false, delay});
    }
    if (!retry) break;
    sleeper_(delay);
  }
  throw TransportError("chat completion failed with status " + std::to_string(last_status),
                       last_status, excerpt(last_body));
}

std::vector<HttpAttempt> HttpBackend::attempt_log() const {
  std::lock_guard lock(mutex_);
  return attempts_;
}

}  // namespace synworld
