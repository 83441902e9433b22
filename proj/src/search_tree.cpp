#include "synworld/search_tree.hpp"

#include <algorithm>

#include "synworld/error.hpp"

namespace synworld {

std::string_view to_string(OptimizeMode mode) {
  switch (mode) {
    case OptimizeMode::Both:
      return "both";
    case OptimizeMode::DescriptionOnly:
      return "description-only";
    case OptimizeMode::WorkflowOnly:
      return "workflow-only";
  }
  return "both";
}

std::optional<OptimizeMode> parse_optimize_mode(std::string_view text) {
  if (text == "both") return OptimizeMode::Both;
  if (text == "description-only") return OptimizeMode::DescriptionOnly;
  if (text == "workflow-only") return OptimizeMode::WorkflowOnly;
  return std::nullopt;
}

void validate_search_config(const SearchConfig& config) {
  if (config.width < 1) throw ArgumentError("width must be >= 1");
  if (config.max_iterations < 1) throw ArgumentError("max_iterations must be >= 1");
  if (!(config.exploration_c >= 0.0)) throw ArgumentError("exploration_c must be >= 0");
  if (config.eval_sample_size < 1) throw ArgumentError("eval_sample_size must be >= 1");
  if (config.trajectory_cap < 1) throw ArgumentError("trajectory_cap must be >= 1");
  if (config.max_steps < 1) throw ArgumentError("max_steps must be >= 1");
}

const MctsNode& SearchTree::node(NodeId id) const {
  if (!contains(id)) throw ArgumentError("no node " + std::to_string(id));
  return nodes_[static_cast<std::size_t>(id)];
}

MctsNode& SearchTree::node(NodeId id) {
  if (!contains(id)) throw ArgumentError("no node " + std::to_string(id));
  return nodes_[static_cast<std::size_t>(id)];
}

NodeId SearchTree::add_child(NodeId parent, ActionKnowledge knowledge, std::string modification) {
  node(parent);  // bounds check
  MctsNode child;
  child.node_id = static_cast<NodeId>(nodes_.size());
  child.parent = parent;
  child.knowledge = std::move(knowledge);
  child.modification = std::move(modification);
  nodes_.push_back(std::move(child));
  nodes_[static_cast<std::size_t>(parent)].children.push_back(nodes_.back().node_id);
  return nodes_.back().node_id;
}

void SearchTree::remove_last() {
  if (nodes_.size() <= 1) throw ArgumentError("cannot remove the root");
  const MctsNode& last = nodes_.back();
  if (!last.children.empty()) throw ArgumentError("cannot remove a node with children");
  auto& siblings = nodes_[static_cast<std::size_t>(*last.parent)].children;
  std::erase(siblings, last.node_id);
  nodes_.pop_back();
}

std::vector<NodeId> SearchTree::path_to_root(NodeId id) const {
  std::vector<NodeId> path;
  std::optional<NodeId> cur = id;
  while (cur) {
    path.push_back(*cur);
    cur = node(*cur).parent;
  }
  return path;
}

int SearchTree::depth(NodeId id) const { return static_cast<int>(path_to_root(id).size()) - 1; }

std::optional<NodeId> SearchTree::best_node() const {
  std::optional<NodeId> best;
  for (const auto& n : nodes_) {
    if (!n.score) continue;
    if (!best || *n.score > *nodes_[static_cast<std::size_t>(*best)].score) best = n.node_id;
  }
  return best;
}

void SearchTree::check_consistency() const {
  if (nodes_.empty()) throw FormatError("tree has no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const MctsNode& n = nodes_[i];
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (n.node_id != static_cast<NodeId>(i)) throw FormatError(where + ".node_id: ids must be dense from 0");
    if (i == 0) {
      if (n.parent) throw FormatError(where + ".parent: root must not have a parent");
    } else {
      if (!n.parent || !contains(*n.parent) || *n.parent >= n.node_id)
        throw FormatError(where + ".parent: invalid parent link");
      const auto& siblings = nodes_[static_cast<std::size_t>(*n.parent)].children;
      if (std::find(siblings.begin(), siblings.end(), n.node_id) == siblings.end())
        throw FormatError(where + ".parent: parent does not list this node as a child");
    }
    for (NodeId c : n.children) {
      if (!contains(c) || nodes_[static_cast<std::size_t>(c)].parent != n.node_id)
        throw FormatError(where + ".children: child link is not reciprocated");
    }
    if (n.score && (*n.score < 0.0 || *n.score > 1.0)) throw FormatError(where + ".score: outside [0,1]");
    if (n.visits < 0) throw FormatError(where + ".visits: negative");
  }
}

SearchTree init_tree(ActionKnowledge initial, double baseline_score) {
  if (!(baseline_score >= 0.0 && baseline_score <= 1.0))
    throw ArgumentError("baseline_score must lie in [0,1]");
  SearchTree tree;
  MctsNode root;
  root.node_id = 0;
  root.visits = 1;
  root.score = baseline_score;
  root.knowledge = std::move(initial);
  tree.nodes_.push_back(std::move(root));
  return tree;
}

}  // namespace synworld
