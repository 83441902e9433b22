#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "synworld/llm.hpp"

namespace synworld {

/// Environment variable consulted when HttpBackendConfig::api_key is empty.
inline constexpr const char* kApiKeyEnv = "SYNWORLD_API_KEY";

struct HttpBackendConfig {
  /// Scheme, host, optional port and path prefix, e.g. "https://api.openai.com/v1".
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-4-turbo";
  int max_retries = 3;
  std::chrono::milliseconds base_delay{500};
  std::chrono::seconds timeout{120};
  std::uint64_t jitter_seed = 0;
};

struct HttpAttempt {
  int attempt = 0;
  /// 0 when no HTTP response was received.
  int status = 0;
  bool success = false;
  std::chrono::milliseconds delay_before_retry{0};
};

/// Client for OpenAI-compatible `POST {base_url}/chat/completions` endpoints.
///
/// Transient failures (network errors, 408, 429 and 5xx) are retried up to
/// `max_retries` times with exponential backoff `base_delay * 2^n` plus a
/// seeded jitter in [0, delay/2]. Any other status, or exhausting the
/// retries, raises TransportError carrying the status and a body excerpt.
class HttpBackend final : public ChatBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpBackend(HttpBackendConfig config, Sleeper sleeper = {});

  std::string complete(const ChatRequest& request) override;

  /// Every attempt made so far, in order.
  std::vector<HttpAttempt> attempt_log() const;

  static bool is_retryable_status(int status);

 private:
  std::chrono::milliseconds backoff(int retry_index);

  HttpBackendConfig config_;
  Sleeper sleeper_;
  std::string scheme_host_port_;
  std::string path_;
  mutable std::mutex mutex_;
  std::mt19937_64 jitter_rng_;
  std::vector<HttpAttempt> attempts_;
};

}  // namespace synworld
