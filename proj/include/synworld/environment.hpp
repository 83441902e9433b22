#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synworld/json_io.hpp"
#include "synworld/llm.hpp"
#include "synworld/types.hpp"

namespace synworld {

using Arguments = std::map<std::string, std::string>;

struct ToolObservation {
  std::string text;
  bool ok = false;
};

/// Behavior contract of an environment the agent acts in. Implementations
/// must be safe to call from several episodes at once.
class EnvironmentInterface {
 public:
  virtual ~EnvironmentInterface() = default;

  virtual const Toolkit& toolkit() const = 0;
  virtual ToolObservation invoke_tool(const std::string& tool_id, const Arguments& arguments,
                                      const Scenario& scenario) const = 0;
  virtual bool check_goal(const Scenario& scenario, const Trajectory& trajectory) const = 0;
};

/// Passing criterion of the simulated environment: every gold tool invoked at
/// least once with ok=true, and the trajectory ends in FINISH with a
/// non-empty answer.
bool gold_coverage_passes(const Scenario& scenario, const Trajectory& trajectory);

/// "k1=v1&k2=v2" with keys sorted and values trimmed and lowercased.
std::string canonicalize_arguments(const Arguments& arguments);

/// Schema check of arguments against a tool; returns the first problem found.
std::optional<std::string> check_arguments(const ToolSpec& tool, const Arguments& arguments);

struct Responder {
  std::string tool_id;
  /// Canonical argument form; a value of "*" matches any value for that key.
  std::string pattern;
  /// May reference arguments as {name}.
  std::string observation;
};

bool pattern_matches(const std::string& pattern, const Arguments& arguments);

struct SimEnvDefinition {
  Toolkit toolkit;
  std::vector<Responder> responders;
  /// Per-tool override of the generic "invalid parameters" response.
  std::map<std::string, std::string> default_responses;
  /// Environment requirements absent from the published descriptions; they
  /// surface only inside error observations.
  std::map<std::string, std::string> hidden_hints;
};

SimEnvDefinition simenv_from_json(const Json& j);
Json to_json(const SimEnvDefinition& def);
SimEnvDefinition load_simenv(const std::filesystem::path& path);

/// Deterministic scripted tool environment. Immutable after construction.
class SimEnv final : public EnvironmentInterface {
 public:
  explicit SimEnv(SimEnvDefinition definition);

  const Toolkit& toolkit() const override { return def_.toolkit; }
  ToolObservation invoke_tool(const std::string& tool_id, const Arguments& arguments,
                              const Scenario& scenario) const override;
  bool check_goal(const Scenario& scenario, const Trajectory& trajectory) const override;

  const SimEnvDefinition& definition() const noexcept { return def_; }

 private:
  SimEnvDefinition def_;
};

/// Delegates tool calls to `inner` and asks an LLM judge for the verdict.
/// The judge must answer with a line containing PASS or FAIL.
class LlmJudgedEnvironment final : public EnvironmentInterface {
 public:
  LlmJudgedEnvironment(const EnvironmentInterface& inner, ChatBackend& judge)
      : inner_(inner), judge_(judge) {}

  const Toolkit& toolkit() const override { return inner_.toolkit(); }
  ToolObservation invoke_tool(const std::string& tool_id, const Arguments& arguments,
                              const Scenario& scenario) const override {
    return inner_.invoke_tool(tool_id, arguments, scenario);
  }
  bool check_goal(const Scenario& scenario, const Trajectory& trajectory) const override;

 private:
  const EnvironmentInterface& inner_;
  ChatBackend& judge_;
};

}  // namespace synworld
