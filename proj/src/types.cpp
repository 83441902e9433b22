#include "synworld/types.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "synworld/error.hpp"

namespace synworld {

std::string_view to_string(ParamType type) {
  switch (type) {
    case ParamType::String:
      return "string";
    case ParamType::Number:
      return "number";
    case ParamType::Boolean:
      return "boolean";
    case ParamType::Enum:
      return "enum";
  }
  return "string";
}

std::optional<ParamType> parse_param_type(std::string_view text) {
  if (text == "string") return ParamType::String;
  if (text == "number") return ParamType::Number;
  if (text == "boolean") return ParamType::Boolean;
  if (text == "enum") return ParamType::Enum;
  return std::nullopt;
}

const ParamSpec* ToolSpec::find_parameter(std::string_view param_name) const {
  auto it = std::find_if(parameters.begin(), parameters.end(),
                         [&](const ParamSpec& p) { return p.name == param_name; });
  return it == parameters.end() ? nullptr : &*it;
}

Toolkit::Toolkit(std::vector<ToolSpec> tools) : tools_(std::move(tools)) {
  if (tools_.empty()) throw FormatError("toolkit must contain at least one tool");
  std::unordered_set<std::string> seen;
  for (const auto& tool : tools_) {
    if (tool.tool_id.empty()) throw FormatError("tool with empty tool_id");
    if (!seen.insert(tool.tool_id).second)
      throw FormatError("duplicate tool_id '" + tool.tool_id + "'");
    if (tool.name.empty()) throw FormatError("tool '" + tool.tool_id + "' has an empty name");
    if (tool.description.empty())
      throw FormatError("tool '" + tool.tool_id + "' has an empty description");
    std::unordered_set<std::string> params;
    for (const auto& p : tool.parameters) {
      if (p.name.empty()) throw FormatError("tool '" + tool.tool_id + "' has an unnamed parameter");
      if (!params.insert(p.name).second)
        throw FormatError("tool '" + tool.tool_id + "' repeats parameter '" + p.name + "'");
    }
  }
}

const ToolSpec* Toolkit::find(std::string_view tool_id) const {
  auto it = std::find_if(tools_.begin(), tools_.end(),
                         [&](const ToolSpec& t) { return t.tool_id == tool_id; });
  return it == tools_.end() ? nullptr : &*it;
}

std::vector<std::string> Toolkit::ids() const {
  std::vector<std::string> out;
  out.reserve(tools_.size());
  for (const auto& t : tools_) out.push_back(t.tool_id);
  return out;
}

ActionKnowledge ActionKnowledge::from_toolkit(const Toolkit& toolkit, std::string workflow) {
  ActionKnowledge ak;
  for (const auto& t : toolkit.tools()) ak.descriptions.emplace(t.tool_id, t.description);
  ak.workflow = std::move(workflow);
  return ak;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::string truncate_words(std::string_view text, std::size_t max_words) {
  std::string out;
  std::size_t words = 0;
  std::size_t i = 0;
  while (i < text.size() && words < max_words) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (!out.empty()) out += ' ';
    out.append(text.substr(start, i - start));
    ++words;
  }
  return out;
}

ValidationResult validate_action_knowledge(const ActionKnowledge& ak, const Toolkit& toolkit) {
  ValidationResult result;
  for (const auto& tool : toolkit.tools()) {
    if (!ak.descriptions.contains(tool.tool_id))
      result.violations.push_back("missing description for " + tool.tool_id);
  }
  for (const auto& [id, _] : ak.descriptions) {
    if (!toolkit.contains(id)) result.violations.push_back("unexpected description for " + id);
  }
  if (word_count(ak.workflow) > kWorkflowWordCap)
    result.violations.push_back("workflow exceeds " + std::to_string(kWorkflowWordCap) + " words");
  return result;
}

void check_scenario(const Scenario& scenario, const Toolkit& toolkit) {
  if (scenario.background.empty() || scenario.goal.empty())
    throw ArgumentError("scenario '" + scenario.scenario_id + "' has an empty background or goal");
  if (scenario.gold_tools.empty())
    throw ArgumentError("scenario '" + scenario.scenario_id + "' has no gold tools");
  for (const auto& id : scenario.gold_tools) {
    if (!toolkit.contains(id))
      throw ArgumentError("scenario '" + scenario.scenario_id + "' names unknown gold tool '" + id +
                          "'");
  }
}

}  // namespace synworld
