#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "synworld/environment.hpp"
#include "synworld/json_io.hpp"
#include "synworld/types.hpp"

namespace synworld::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(SYNWORLD_DATA_DIR) / name;
}

inline SimEnvDefinition fixture_env() { return load_simenv(data_path("fixtures/simenv_5tools.json")); }
inline std::vector<Scenario> fixture_scenarios() { return load_scenarios(data_path("fixtures/scenarios_12.json")); }
inline ActionKnowledge fixture_knowledge() { return load_knowledge(data_path("fixtures/knowledge_initial.json")); }

inline ToolSpec simple_tool(const std::string& id, const std::string& description = "does things") {
  return ToolSpec{id, id, description, {{"q", ParamType::String, true, "query", {}}}, ""};
}

inline Toolkit simple_toolkit(std::initializer_list<std::string> ids) {
  std::vector<ToolSpec> tools;
  for (const auto& id : ids) tools.push_back(simple_tool(id, "Tool " + id + "."));
  return Toolkit(std::move(tools));
}

inline Scenario scenario(const std::string& id, const std::string& background, const std::string& goal,
                         std::set<std::string> gold = {"t"}) {
  return Scenario{id, background, goal, gold, gold};
}

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("synworld-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace synworld::testing
