#include "synworld/llm.hpp"

#include "synworld/error.hpp"

namespace synworld {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

ChatRequest ChatRequest::single(std::string user, std::string system, double temperature) {
  ChatRequest request;
  if (!system.empty()) request.messages.push_back({Role::System, std::move(system)});
  request.messages.push_back({Role::User, std::move(user)});
  request.temperature = temperature;
  return request;
}

std::string ChatRequest::rendered_prompt() const {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "\n\n";
    out += m.content;
  }
  return out;
}

void validate_request(const ChatRequest& request) {
  if (request.messages.empty()) throw ArgumentError("chat request has no messages");
  for (const auto& m : request.messages) {
    if (m.role == Role::System) continue;
    if (m.role != Role::User) throw ArgumentError("first non-system message must be from the user");
    break;
  }
  if (request.temperature < 0.0) throw ArgumentError("temperature must be >= 0");
  if (request.max_tokens <= 0) throw ArgumentError("max_tokens must be positive");
}

std::size_t count_tokens_estimate(std::string_view text) { return (text.size() + 3) / 4; }

std::string BudgetedBackend::complete(const ChatRequest& request) {
  std::string response = inner_.complete(request);
  std::size_t prompt = 0;
  for (const auto& m : request.messages) prompt += count_tokens_estimate(m.content);
  budget_.add(prompt, count_tokens_estimate(response));
  return response;
}

PromptMatcher PromptMatcher::substring(std::string needle) {
  PromptMatcher m;
  m.source_ = std::move(needle);
  return m;
}

PromptMatcher PromptMatcher::regex(const std::string& pattern) {
  PromptMatcher m;
  m.source_ = pattern;
  try {
    m.regex_ = std::make_shared<const std::regex>(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid rule regex '" + pattern + "': " + e.what());
  }
  return m;
}

bool PromptMatcher::matches(std::string_view prompt) const {
  if (regex_) return std::regex_search(prompt.begin(), prompt.end(), *regex_);
  return prompt.find(source_) != std::string_view::npos;
}

ScriptedBackend& ScriptedBackend::on(std::string needle, std::string response) {
  rules_.push_back({PromptMatcher::substring(std::move(needle)), std::move(response)});
  return *this;
}

ScriptedBackend& ScriptedBackend::on_regex(const std::string& pattern, std::string response) {
  rules_.push_back({PromptMatcher::regex(pattern), std::move(response)});
  return *this;
}

ScriptedBackend& ScriptedBackend::otherwise(std::string response) {
  default_ = std::move(response);
  return *this;
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
  validate_request(request);
  const std::string prompt = request.rendered_prompt();
  int index = -1;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].matcher.matches(prompt)) {
      index = static_cast<int>(i);
      break;
    }
  }
  if (index < 0 && !default_)
    throw ConfigError("scripted backend: no rule matched and no default response");
  std::string response = index >= 0 ? rules_[static_cast<std::size_t>(index)].response : *default_;
  std::lock_guard lock(mutex_);
  log_.push_back({prompt, response, index});
  return response;
}

std::vector<ScriptedCall> ScriptedBackend::call_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

std::string CallbackBackend::complete(const ChatRequest& request) {
  validate_request(request);
  return handler_(request);
}

}  // namespace synworld
