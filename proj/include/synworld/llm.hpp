#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace synworld {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::User;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string model;

  /// Single-user-message request, optionally preceded by a system message.
  static ChatRequest single(std::string user, std::string system = {}, double temperature = 0.0);

  /// Message contents joined with blank lines; this is what scripted rules match.
  std::string rendered_prompt() const;
};

/// Throws ArgumentError unless messages are non-empty, the first non-system
/// message is from the user, temperature >= 0 and max_tokens > 0.
void validate_request(const ChatRequest& request);

/// Chat-completion backend. Implementations are safe for concurrent calls.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  /// Returns the first-choice assistant content.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// ceil(characters / 4).
std::size_t count_tokens_estimate(std::string_view text);

/// Thread-safe accumulator of estimated prompt/completion tokens.
class TokenBudget {
 public:
  void add(std::size_t prompt_tokens, std::size_t completion_tokens) {
    prompt_.fetch_add(prompt_tokens, std::memory_order_relaxed);
    completion_.fetch_add(completion_tokens, std::memory_order_relaxed);
    calls_.fetch_add(1, std::memory_order_relaxed);
  }
  std::size_t prompt_tokens() const { return prompt_.load(); }
  std::size_t completion_tokens() const { return completion_.load(); }
  std::size_t total_tokens() const { return prompt_tokens() + completion_tokens(); }
  std::size_t calls() const { return calls_.load(); }

 private:
  std::atomic<std::size_t> prompt_{0};
  std::atomic<std::size_t> completion_{0};
  std::atomic<std::size_t> calls_{0};
};

/// Wraps a backend and records estimated token usage of every successful call.
class BudgetedBackend final : public ChatBackend {
 public:
  BudgetedBackend(ChatBackend& inner, TokenBudget& budget) : inner_(inner), budget_(budget) {}
  std::string complete(const ChatRequest& request) override;

 private:
  ChatBackend& inner_;
  TokenBudget& budget_;
};

/// Matcher over the rendered prompt: plain substring or ECMAScript regex.
class PromptMatcher {
 public:
  static PromptMatcher substring(std::string needle);
  static PromptMatcher regex(const std::string& pattern);

  bool matches(std::string_view prompt) const;
  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::shared_ptr<const std::regex> regex_;
};

struct ScriptedRule {
  PromptMatcher matcher;
  std::string response;
};

struct ScriptedCall {
  std::string prompt;
  std::string response;
  /// Index of the rule that matched, -1 for the default response.
  int rule_index = -1;
};

/// Deterministic rule-table backend: the first matching rule wins, otherwise
/// the default response is returned. Every call is appended to the log.
class ScriptedBackend final : public ChatBackend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<ScriptedRule> rules,
                           std::optional<std::string> default_response = std::nullopt)
      : rules_(std::move(rules)), default_(std::move(default_response)) {}

  ScriptedBackend& on(std::string needle, std::string response);
  ScriptedBackend& on_regex(const std::string& pattern, std::string response);
  ScriptedBackend& otherwise(std::string response);

  std::string complete(const ChatRequest& request) override;

  std::vector<ScriptedCall> call_log() const;
  std::size_t call_count() const;

 private:
  std::vector<ScriptedRule> rules_;
  std::optional<std::string> default_;
  mutable std::mutex mutex_;
  std::vector<ScriptedCall> log_;
};

/// Backend delegating to a callable; used for programmable test doubles and
/// the offline simulated stack.
class CallbackBackend final : public ChatBackend {
 public:
  using Handler = std::function<std::string(const ChatRequest&)>;

  explicit CallbackBackend(Handler handler) : handler_(std::move(handler)) {}
  std::string complete(const ChatRequest& request) override;

 private:
  Handler handler_;
};

}  // namespace synworld
