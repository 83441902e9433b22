#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "synworld/error.hpp"
#include "synworld/types.hpp"

namespace synworld {

using Json = nlohmann::ordered_json;

/// Reads `object[key]` as T, naming `where.key` in the FormatError when the
/// field is missing or has the wrong type.
template <class T>
T read_field(const Json& object, std::string_view key, std::string_view where) {
  std::string path = std::string(where) + "." + std::string(key);
  if (!object.is_object()) throw FormatError(std::string(where) + ": expected an object");
  auto it = object.find(key);
  if (it == object.end()) throw FormatError(path + ": missing field");
  try {
    return it->template get<T>();
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

template <class T>
T read_field_or(const Json& object, std::string_view key, std::string_view where, T fallback) {
  if (!object.is_object() || !object.contains(key)) return fallback;
  return read_field<T>(object, key, where);
}

Json to_json(const ParamSpec& p);
Json to_json(const ToolSpec& t);
Json to_json(const Toolkit& toolkit);
Json to_json(const ActionKnowledge& ak);
Json to_json(const Scenario& s);
Json to_json(const TrajectoryStep& step);
Json to_json(const Trajectory& t);

ParamSpec param_from_json(const Json& j, std::string_view where);
ToolSpec tool_from_json(const Json& j, std::string_view where);
/// Reads the top-level "tools" array of a toolkit document.
Toolkit toolkit_from_json(const Json& j);
ActionKnowledge knowledge_from_json(const Json& j, std::string_view where = "knowledge");
Scenario scenario_from_json(const Json& j, std::string_view where);
TrajectoryStep step_from_json(const Json& j, std::string_view where);
Trajectory trajectory_from_json(const Json& j, std::string_view where);

Json scenarios_to_json(const std::vector<Scenario>& scenarios);
std::vector<Scenario> scenarios_from_json(const Json& j);

/// File helpers. Reading throws FormatError on I/O or parse failure; writing
/// emits UTF-8 JSON with two-space indentation and a trailing newline.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& document);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

Toolkit load_toolkit(const std::filesystem::path& path);
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);
void save_scenarios(const std::filesystem::path& path, const std::vector<Scenario>& scenarios);
ActionKnowledge load_knowledge(const std::filesystem::path& path);
void save_knowledge(const std::filesystem::path& path, const ActionKnowledge& ak);

/// Canonical text rendering of a double used across reports and prompts.
std::string format_fixed(double value, int decimals = 4);

}  // namespace synworld
