#include "synworld/environment.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "synworld/error.hpp"
#include "synworld/transcript.hpp"

namespace synworld {

namespace {

std::string trim_lower(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::map<std::string, std::string> parse_pattern(const std::string& pattern) {
  std::map<std::string, std::string> out;
  std::istringstream in(pattern);
  std::string item;
  while (std::getline(in, item, '&')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      out[item] = "";
    } else {
      out[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  return out;
}

bool is_number(const std::string& text) {
  if (text.empty()) return false;
  char* end = nullptr;
  std::strtod(text.c_str(), &end);
  return end != nullptr && *end == '\0';
}

std::string substitute(std::string text, const Arguments& arguments) {
  for (const auto& [k, v] : arguments) {
    const std::string slot = "{" + k + "}";
    for (auto pos = text.find(slot); pos != std::string::npos; pos = text.find(slot, pos + v.size()))
      text.replace(pos, slot.size(), v);
  }
  return text;
}

}  // namespace

bool gold_coverage_passes(const Scenario& scenario, const Trajectory& trajectory) {
  if (!trajectory.finished() || trajectory.final_answer.empty()) return false;
  for (const auto& gold : scenario.gold_tools) {
    bool used = std::any_of(trajectory.steps.begin(), trajectory.steps.end(),
                            [&](const TrajectoryStep& s) { return s.tool_id == gold && s.ok; });
    if (!used) return false;
  }
  return true;
}

std::string canonicalize_arguments(const Arguments& arguments) {
  std::string out;
  for (const auto& [k, v] : arguments) {
    if (!out.empty()) out += '&';
    out += k + "=" + trim_lower(v);
  }
  return out;
}

bool pattern_matches(const std::string& pattern, const Arguments& arguments) {
  auto expected = parse_pattern(pattern);
  if (expected.size() != arguments.size()) return false;
  for (const auto& [k, v] : arguments) {
    auto it = expected.find(k);
    if (it == expected.end()) return false;
    if (it->second != "*" && it->second != trim_lower(v)) return false;
  }
  return true;
}

std::optional<std::string> check_arguments(const ToolSpec& tool, const Arguments& arguments) {
  for (const auto& [name, value] : arguments) {
    const ParamSpec* p = tool.find_parameter(name);
    if (p == nullptr) return "unknown parameter '" + name + "'";
    switch (p->type) {
      case ParamType::Number:
        if (!is_number(value)) return "parameter '" + name + "' must be a number";
        break;
      case ParamType::Boolean: {
        auto v = trim_lower(value);
        if (v != "true" && v != "false") return "parameter '" + name + "' must be true or false";
        break;
      }
      case ParamType::Enum:
        if (std::find(p->enum_values.begin(), p->enum_values.end(), trim_lower(value)) ==
            p->enum_values.end())
          return "parameter '" + name + "' must be one of the allowed values";
        break;
      case ParamType::String:
        break;
    }
  }
  for (const auto& p : tool.parameters) {
    if (p.required && !arguments.contains(p.name))
      return "missing required parameter '" + p.name + "'";
  }
  return std::nullopt;
}

SimEnvDefinition simenv_from_json(const Json& j) {
  SimEnvDefinition def{toolkit_from_json(j), {}, {}, {}};
  if (j.contains("responders")) {
    const Json& arr = j.at("responders");
    if (!arr.is_array()) throw FormatError("simenv.responders: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string where = "simenv.responders[" + std::to_string(i) + "]";
      Responder r{read_field<std::string>(arr[i], "tool_id", where),
                  read_field<std::string>(arr[i], "pattern", where),
                  read_field<std::string>(arr[i], "observation", where)};
      if (!def.toolkit.contains(r.tool_id))
        throw FormatError(where + ".tool_id: unknown tool '" + r.tool_id + "'");
      def.responders.push_back(std::move(r));
    }
  }
  def.default_responses =
      read_field_or<std::map<std::string, std::string>>(j, "default_responses", "simenv", {});
  def.hidden_hints = read_field_or<std::map<std::string, std::string>>(j, "hidden_hints", "simenv", {});
  for (const auto& [id, _] : def.hidden_hints)
    if (!def.toolkit.contains(id)) throw FormatError("simenv.hidden_hints: unknown tool '" + id + "'");
  for (const auto& [id, _] : def.default_responses)
    if (!def.toolkit.contains(id))
      throw FormatError("simenv.default_responses: unknown tool '" + id + "'");
  return def;
}

Json to_json(const SimEnvDefinition& def) {
  Json j = to_json(def.toolkit);
  Json responders = Json::array();
  for (const auto& r : def.responders)
    responders.push_back(Json{{"tool_id", r.tool_id}, {"pattern", r.pattern}, {"observation", r.observation}});
  j["responders"] = responders;
  j["default_responses"] = def.default_responses;
  j["hidden_hints"] = def.hidden_hints;
  return j;
}

SimEnvDefinition load_simenv(const std::filesystem::path& path) {
  return simenv_from_json(read_json_file(path));
}

SimEnv::SimEnv(SimEnvDefinition definition) : def_(std::move(definition)) {}

ToolObservation SimEnv::invoke_tool(const std::string& tool_id, const Arguments& arguments,
                                    const Scenario& /*scenario*/) const {
  const ToolSpec* tool = def_.toolkit.find(tool_id);
  if (tool == nullptr) return {"Error: unknown tool '" + tool_id + "'.", false};
  if (auto problem = check_arguments(*tool, arguments))
    return {"Error: invalid parameters for " + tool_id + ": " + *problem + ".", false};

  for (const auto& r : def_.responders) {
    if (r.tool_id == tool_id && pattern_matches(r.pattern, arguments))
      return {substitute(r.observation, arguments), true};
  }

  std::string text;
  if (auto it = def_.default_responses.find(tool_id); it != def_.default_responses.end()) {
    text = it->second;
  } else {
    text = "Error: invalid parameters for " + tool_id + ".";
  }
  if (auto hint = def_.hidden_hints.find(tool_id); hint != def_.hidden_hints.end())
    text += " Hint: " + hint->second;
  return {text, false};
}

bool SimEnv::check_goal(const Scenario& scenario, const Trajectory& trajectory) const {
  return gold_coverage_passes(scenario, trajectory);
}

bool LlmJudgedEnvironment::check_goal(const Scenario& scenario, const Trajectory& trajectory) const {
  std::string prompt =
      "Judge whether the agent completed the task.\n"
      "Background: " + scenario.background + "\nGoal: " + scenario.goal + "\n\n" +
      serialize_trajectory(trajectory, 1) +
      "\nReply with a single line: Verdict: PASS or Verdict: FAIL\n";
  std::string verdict = judge_.complete(ChatRequest::single(prompt));
  for (auto& c : verdict) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  auto pass = verdict.find("PASS");
  auto fail = verdict.find("FAIL");
  if (pass == std::string::npos) return false;
  return fail == std::string::npos || pass < fail;
}

}  // namespace synworld
