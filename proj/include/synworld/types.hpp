#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace synworld {

enum class ParamType { String, Number, Boolean, Enum };

std::string_view to_string(ParamType type);
std::optional<ParamType> parse_param_type(std::string_view text);

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::String;
  bool required = false;
  std::string description;
  /// Allowed values when `type == ParamType::Enum`.
  std::vector<std::string> enum_values;

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct ToolSpec {
  std::string tool_id;
  std::string name;
  std::string description;
  std::vector<ParamSpec> parameters;
  std::string response_description;

  const ParamSpec* find_parameter(std::string_view param_name) const;

  friend bool operator==(const ToolSpec&, const ToolSpec&) = default;
};

/// Ordered, validated collection of tools. Construction throws FormatError
/// on an empty list, duplicate ids, empty name/description or duplicate
/// parameter names.
class Toolkit {
 public:
  explicit Toolkit(std::vector<ToolSpec> tools);

  const std::vector<ToolSpec>& tools() const noexcept { return tools_; }
  std::size_t size() const noexcept { return tools_.size(); }
  const ToolSpec* find(std::string_view tool_id) const;
  bool contains(std::string_view tool_id) const { return find(tool_id) != nullptr; }
  std::vector<std::string> ids() const;

  friend bool operator==(const Toolkit&, const Toolkit&) = default;

 private:
  std::vector<ToolSpec> tools_;
};

inline constexpr std::size_t kWorkflowWordCap = 250;
inline constexpr std::size_t kWorkflowWordTarget = 200;

/// The optimizable artifact: per-tool descriptions plus one global workflow.
struct ActionKnowledge {
  std::map<std::string, std::string> descriptions;
  std::string workflow;
  int version = 0;

  /// Descriptions copied from the toolkit, version 0.
  static ActionKnowledge from_toolkit(const Toolkit& toolkit, std::string workflow);

  friend bool operator==(const ActionKnowledge&, const ActionKnowledge&) = default;
};

struct Scenario {
  std::string scenario_id;
  std::string background;
  std::string goal;
  std::set<std::string> gold_tools;
  std::set<std::string> origin_subset;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline constexpr std::string_view kFinish = "FINISH";

struct TrajectoryStep {
  std::string thought;
  std::string tool_id;
  std::map<std::string, std::string> arguments;
  std::string observation;
  bool ok = false;

  bool is_finish() const { return tool_id == kFinish; }

  friend bool operator==(const TrajectoryStep&, const TrajectoryStep&) = default;
};

struct Trajectory {
  std::string scenario_id;
  std::vector<TrajectoryStep> steps;
  std::string final_answer;
  double score = 0.0;
  /// Set when the episode aborted (e.g. transport failure); score is 0.
  std::optional<std::string> error;

  bool finished() const { return !steps.empty() && steps.back().is_finish(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct OptimizationExperience {
  double score_before = 0.0;
  double score_after = 0.0;
  std::string modification;

  friend bool operator==(const OptimizationExperience&, const OptimizationExperience&) = default;
};

/// Whitespace-delimited token count.
std::size_t word_count(std::string_view text);

/// First `max_words` whitespace tokens joined by single spaces.
std::string truncate_words(std::string_view text, std::size_t max_words);

struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
  explicit operator bool() const noexcept { return ok(); }
};

ValidationResult validate_action_knowledge(const ActionKnowledge& ak, const Toolkit& toolkit);

/// Throws ArgumentError unless the scenario is well formed against the toolkit.
void check_scenario(const Scenario& scenario, const Toolkit& toolkit);

}  // namespace synworld
