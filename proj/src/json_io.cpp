#include "synworld/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace synworld {

namespace {

std::string indexed(std::string_view where, std::size_t i) {
  return std::string(where) + "[" + std::to_string(i) + "]";
}

const Json& require_array(const Json& j, std::string_view key, std::string_view where) {
  std::string path = std::string(where) + "." + std::string(key);
  if (!j.is_object() || !j.contains(key)) throw FormatError(path + ": missing field");
  const Json& arr = j.at(key);
  if (!arr.is_array()) throw FormatError(path + ": expected an array");
  return arr;
}

}  // namespace

Json to_json(const ParamSpec& p) {
  Json j{{"name", p.name},
         {"type", std::string(to_string(p.type))},
         {"required", p.required},
         {"description", p.description}};
  if (!p.enum_values.empty()) j["enum_values"] = p.enum_values;
  return j;
}

Json to_json(const ToolSpec& t) {
  Json params = Json::array();
  for (const auto& p : t.parameters) params.push_back(to_json(p));
  return Json{{"tool_id", t.tool_id},
              {"name", t.name},
              {"description", t.description},
              {"parameters", params},
              {"response_description", t.response_description}};
}

Json to_json(const Toolkit& toolkit) {
  Json tools = Json::array();
  for (const auto& t : toolkit.tools()) tools.push_back(to_json(t));
  return Json{{"tools", tools}};
}

Json to_json(const ActionKnowledge& ak) {
  Json desc = Json::object();
  for (const auto& [id, text] : ak.descriptions) desc[id] = text;
  return Json{{"version", ak.version}, {"descriptions", desc}, {"workflow", ak.workflow}};
}

Json to_json(const Scenario& s) {
  return Json{{"scenario_id", s.scenario_id},
              {"background", s.background},
              {"goal", s.goal},
              {"gold_tools", s.gold_tools},
              {"origin_subset", s.origin_subset}};
}

Json to_json(const TrajectoryStep& step) {
  Json args = Json::object();
  for (const auto& [k, v] : step.arguments) args[k] = v;
  return Json{{"thought", step.thought},
              {"tool_id", step.tool_id},
              {"arguments", args},
              {"observation", step.observation},
              {"ok", step.ok}};
}

Json to_json(const Trajectory& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back(to_json(s));
  Json j{{"scenario_id", t.scenario_id},
         {"steps", steps},
         {"final_answer", t.final_answer},
         {"score", t.score}};
  if (t.error) j["error"] = *t.error;
  return j;
}

ParamSpec param_from_json(const Json& j, std::string_view where) {
  ParamSpec p;
  p.name = read_field<std::string>(j, "name", where);
  auto type_text = read_field<std::string>(j, "type", where);
  auto type = parse_param_type(type_text);
  if (!type) throw FormatError(std::string(where) + ".type: unknown type tag '" + type_text + "'");
  p.type = *type;
  p.required = read_field_or<bool>(j, "required", where, false);
  p.description = read_field_or<std::string>(j, "description", where, "");
  p.enum_values = read_field_or<std::vector<std::string>>(j, "enum_values", where, {});
  return p;
}

ToolSpec tool_from_json(const Json& j, std::string_view where) {
  ToolSpec t;
  t.tool_id = read_field<std::string>(j, "tool_id", where);
  t.name = read_field<std::string>(j, "name", where);
  t.description = read_field<std::string>(j, "description", where);
  t.response_description = read_field_or<std::string>(j, "response_description", where, "");
  if (j.contains("parameters")) {
    const Json& params = require_array(j, "parameters", where);
    std::string base = std::string(where) + ".parameters";
    for (std::size_t i = 0; i < params.size(); ++i)
      t.parameters.push_back(param_from_json(params[i], indexed(base, i)));
  }
  return t;
}

Toolkit toolkit_from_json(const Json& j) {
  const Json& tools = require_array(j, "tools", "toolkit");
  std::vector<ToolSpec> out;
  for (std::size_t i = 0; i < tools.size(); ++i)
    out.push_back(tool_from_json(tools[i], indexed("toolkit.tools", i)));
  return Toolkit(std::move(out));
}

ActionKnowledge knowledge_from_json(const Json& j, std::string_view where) {
  ActionKnowledge ak;
  ak.version = read_field_or<int>(j, "version", where, 0);
  ak.descriptions = read_field<std::map<std::string, std::string>>(j, "descriptions", where);
  ak.workflow = read_field<std::string>(j, "workflow", where);
  return ak;
}

Scenario scenario_from_json(const Json& j, std::string_view where) {
  Scenario s;
  s.scenario_id = read_field<std::string>(j, "scenario_id", where);
  s.background = read_field<std::string>(j, "background", where);
  s.goal = read_field<std::string>(j, "goal", where);
  s.gold_tools = read_field<std::set<std::string>>(j, "gold_tools", where);
  s.origin_subset = read_field_or<std::set<std::string>>(j, "origin_subset", where, s.gold_tools);
  return s;
}

TrajectoryStep step_from_json(const Json& j, std::string_view where) {
  TrajectoryStep s;
  s.thought = read_field_or<std::string>(j, "thought", where, "");
  s.tool_id = read_field<std::string>(j, "tool_id", where);
  s.arguments = read_field_or<std::map<std::string, std::string>>(j, "arguments", where, {});
  s.observation = read_field_or<std::string>(j, "observation", where, "");
  s.ok = read_field<bool>(j, "ok", where);
  return s;
}

Trajectory trajectory_from_json(const Json& j, std::string_view where) {
  Trajectory t;
  t.scenario_id = read_field<std::string>(j, "scenario_id", where);
  const Json& steps = require_array(j, "steps", where);
  std::string base = std::string(where) + ".steps";
  for (std::size_t i = 0; i < steps.size(); ++i)
    t.steps.push_back(step_from_json(steps[i], indexed(base, i)));
  t.final_answer = read_field_or<std::string>(j, "final_answer", where, "");
  t.score = read_field<double>(j, "score", where);
  if (j.contains("error")) t.error = read_field<std::string>(j, "error", where);
  return t;
}

Json scenarios_to_json(const std::vector<Scenario>& scenarios) {
  Json arr = Json::array();
  for (const auto& s : scenarios) arr.push_back(to_json(s));
  return Json{{"scenarios", arr}};
}

std::vector<Scenario> scenarios_from_json(const Json& j) {
  const Json& arr = j.is_array() ? j : require_array(j, "scenarios", "store");
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(scenario_from_json(arr[i], indexed("store.scenarios", i)));
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& document) {
  write_text_file(path, document.dump(2) + "\n");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

Toolkit load_toolkit(const std::filesystem::path& path) {
  return toolkit_from_json(read_json_file(path));
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
  return scenarios_from_json(read_json_file(path));
}

void save_scenarios(const std::filesystem::path& path, const std::vector<Scenario>& scenarios) {
  write_json_file(path, scenarios_to_json(scenarios));
}

ActionKnowledge load_knowledge(const std::filesystem::path& path) {
  return knowledge_from_json(read_json_file(path));
}

void save_knowledge(const std::filesystem::path& path, const ActionKnowledge& ak) {
  write_json_file(path, to_json(ak));
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace synworld
