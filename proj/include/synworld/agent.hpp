#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synworld/environment.hpp"
#include "synworld/llm.hpp"
#include "synworld/types.hpp"

namespace synworld {

/// Section heading that opens the task block of every agent prompt.
inline constexpr std::string_view kAgentTaskMarker = "## Task";

struct AgentAction {
  std::string thought;
  /// Tool id, or kFinish.
  std::string tool_id;
  Arguments arguments;
  std::string answer;
};

/// Parses "Thought: ... / Action: <tool_id> / Args: <k=v, ...|JSON object>"
/// or the terminal "Action: FINISH / Answer: ...". Keywords are matched
/// case-insensitively; returns nullopt when no usable action is present.
std::optional<AgentAction> parse_agent_action(std::string_view text);

std::string agent_system_prompt();

/// User message for the next step: tools with their current descriptions,
/// the workflow, the scenario and the transcript so far.
std::string render_agent_prompt(const ActionKnowledge& ak, const Toolkit& toolkit,
                                const Scenario& scenario, const std::vector<TrajectoryStep>& steps,
                                const std::string& final_answer = {});

struct EpisodeOptions {
  int max_steps = 8;
  double temperature = 0.0;
};

/// ReAct-style loop. Transport failures propagate as TransportError;
/// EnvironmentError from the environment propagates unchanged.
Trajectory run_episode(const ActionKnowledge& ak, const Scenario& scenario,
                       const EnvironmentInterface& env, ChatBackend& llm,
                       const EpisodeOptions& options = {});

/// 1.0 if the environment accepts the trajectory, else 0.0.
double score_trajectory(const Scenario& scenario, const Trajectory& trajectory,
                        const EnvironmentInterface& env);

struct EvaluationResult {
  std::vector<Trajectory> trajectories;
  double pass_rate = 0.0;
  std::size_t passed = 0;
  std::size_t errors = 0;
};

struct EvaluateOptions {
  EpisodeOptions episode;
  /// Episodes run on this many threads; results are reduced in scenario order.
  int workers = 1;
};

/// Runs one episode per scenario. Episodes whose LLM call fails score 0 and
/// carry the failure in Trajectory::error. Throws ArgumentError on an empty
/// scenario list.
EvaluationResult evaluate(const ActionKnowledge& ak, const std::vector<Scenario>& scenarios,
                          const EnvironmentInterface& env, ChatBackend& llm,
                          const EvaluateOptions& options = {});

}  // namespace synworld
