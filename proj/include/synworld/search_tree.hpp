#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synworld/types.hpp"

namespace synworld {

using NodeId = int;

enum class OptimizeMode { Both, DescriptionOnly, WorkflowOnly };

std::string_view to_string(OptimizeMode mode);
/// Accepts "both", "description-only", "workflow-only".
std::optional<OptimizeMode> parse_optimize_mode(std::string_view text);

struct SearchConfig {
  int width = 3;
  int max_iterations = 15;
  double exploration_c = std::sqrt(2.0);
  /// Scenarios sampled per simulation; ignored when full_evaluation is set.
  int eval_sample_size = 20;
  bool full_evaluation = false;
  int trajectory_cap = 5;
  std::uint64_t seed = 0;
  OptimizeMode mode = OptimizeMode::Both;
  int max_steps = 8;

  friend bool operator==(const SearchConfig&, const SearchConfig&) = default;
};

/// Throws ArgumentError on width < 1, max_iterations < 1, exploration_c < 0,
/// eval_sample_size < 1, trajectory_cap < 1 or max_steps < 1.
void validate_search_config(const SearchConfig& config);

struct MctsNode {
  NodeId node_id = 0;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  int visits = 0;
  /// Sum of backpropagated delta rewards.
  double total_reward = 0.0;
  /// Absolute pass rate of `knowledge`; unset until simulated.
  std::optional<double> score;
  ActionKnowledge knowledge;
  std::string modification;
  std::vector<Trajectory> trajectories;

  friend bool operator==(const MctsNode&, const MctsNode&) = default;
};

/// One select/expand/simulate/backpropagate round.
struct IterationRecord {
  int iteration = 0;
  NodeId selected = 0;
  NodeId new_node = 0;
  double reward = 0.0;
  double node_score = 0.0;
  double best_score = 0.0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

/// Node table with dense ids from 0; node 0 is the root.
class SearchTree {
 public:
  SearchTree() = default;

  const MctsNode& node(NodeId id) const;
  MctsNode& node(NodeId id);
  const std::vector<MctsNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool contains(NodeId id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < nodes_.size();
  }
  NodeId root() const noexcept { return 0; }

  /// Appends an unsimulated child (visits 0, score unset).
  NodeId add_child(NodeId parent, ActionKnowledge knowledge, std::string modification);
  /// Removes the most recently added node; it must be a childless leaf.
  void remove_last();

  /// Node ids from `id` up to the root, inclusive, leaf first.
  std::vector<NodeId> path_to_root(NodeId id) const;
  int depth(NodeId id) const;

  /// Node with the highest score (ties: lowest id); nullopt if none scored.
  std::optional<NodeId> best_node() const;

  /// Throws FormatError when parent/child links, ids or the root are inconsistent.
  void check_consistency() const;

  int iteration = 0;
  std::vector<IterationRecord> history;

  friend bool operator==(const SearchTree&, const SearchTree&) = default;

 private:
  friend SearchTree init_tree(ActionKnowledge, double);
  friend class TreeLoader;
  std::vector<MctsNode> nodes_;
};

/// Single-root tree with visits 1, total_reward 0 and the given score.
/// Throws ArgumentError unless baseline_score lies in [0,1].
SearchTree init_tree(ActionKnowledge initial, double baseline_score);

}  // namespace synworld
