#include "synworld/transcript.hpp"

#include "synworld/json_io.hpp"

namespace synworld {

std::string format_arguments(const std::map<std::string, std::string>& arguments) {
  std::string out;
  for (const auto& [k, v] : arguments) {
    if (!out.empty()) out += ", ";
    out += k + "=" + v;
  }
  return out;
}

std::string format_step(const TrajectoryStep& step, const std::string& final_answer,
                        std::size_t observation_limit) {
  std::string out = "Thought: " + step.thought + "\n";
  out += "Action: " + (step.tool_id.empty() ? std::string("(unparseable)") : step.tool_id) + "\n";
  if (step.is_finish()) {
    out += "Answer: " + final_answer + "\n";
    return out;
  }
  out += "Args: " + format_arguments(step.arguments) + "\n";
  std::string obs = step.observation;
  if (obs.size() > observation_limit) obs = obs.substr(0, observation_limit) + "...";
  out += "Observation: " + obs + "\n";
  return out;
}

std::string serialize_trajectory(const Trajectory& trajectory, std::size_t number,
                                 std::size_t observation_limit) {
  std::string out = "[Trajectory " + std::to_string(number) + "] scenario=" +
                    trajectory.scenario_id + " score=" + format_fixed(trajectory.score, 0) + "\n";
  if (trajectory.error) out += "Episode error: " + *trajectory.error + "\n";
  for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
    out += "Step " + std::to_string(i + 1) + "\n";
    out += format_step(trajectory.steps[i], trajectory.final_answer, observation_limit);
  }
  return out;
}

std::string serialize_trajectories(const std::vector<Trajectory>& trajectories,
                                   std::size_t observation_limit) {
  std::string out;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (i > 0) out += "\n";
    out += serialize_trajectory(trajectories[i], i + 1, observation_limit);
  }
  return out;
}

}  // namespace synworld
