#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "synworld/types.hpp"

namespace synworld {

inline constexpr std::size_t kObservationCharLimit = 500;

/// "k1=v1, k2=v2" in key order.
std::string format_arguments(const std::map<std::string, std::string>& arguments);

/// One step as "Thought/Action/Args/Observation" lines (FINISH steps render
/// "Answer" instead of Args/Observation). Observations are cut to
/// `observation_limit` characters.
std::string format_step(const TrajectoryStep& step, const std::string& final_answer,
                        std::size_t observation_limit = kObservationCharLimit);

/// Numbered step transcript headed by "[Trajectory <n>]".
std::string serialize_trajectory(const Trajectory& trajectory, std::size_t number,
                                 std::size_t observation_limit = kObservationCharLimit);

/// Trajectories numbered from 1, separated by blank lines.
std::string serialize_trajectories(const std::vector<Trajectory>& trajectories,
                                   std::size_t observation_limit = kObservationCharLimit);

}  // namespace synworld
