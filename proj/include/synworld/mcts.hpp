#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "synworld/agent.hpp"
#include "synworld/checkpoint.hpp"
#include "synworld/optimizer.hpp"
#include "synworld/random.hpp"
#include "synworld/search_tree.hpp"

namespace synworld {

/// Value returned for unvisited children.
inline constexpr double kUnvisitedUcb = std::numeric_limits<double>::infinity();

/// mean reward + c * sqrt(ln(parent_visits) / visits); kUnvisitedUcb when
/// the child has no visits. Throws ArgumentError if parent_visits < 1.
double ucb_value(const MctsNode& child, int parent_visits, double c);

/// Descends from the root through nodes holding `width` children, taking the
/// child of highest UCB (ties: lowest id), and returns the first node with
/// fewer than `width` children.
NodeId select_node(const SearchTree& tree, double c, int width);

/// Scores knowledge against a scenario sample (the environment side of the
/// search).
class KnowledgeEvaluator {
 public:
  virtual ~KnowledgeEvaluator() = default;
  virtual EvaluationResult evaluate(const ActionKnowledge& ak,
                                    const std::vector<Scenario>& scenarios) = 0;
};

/// Runs the agent in an environment.
class AgentEvaluator final : public KnowledgeEvaluator {
 public:
  AgentEvaluator(const EnvironmentInterface& env, ChatBackend& agent_llm, EvaluateOptions options = {})
      : env_(env), llm_(agent_llm), options_(options) {}

  EvaluationResult evaluate(const ActionKnowledge& ak,
                            const std::vector<Scenario>& scenarios) override {
    return synworld::evaluate(ak, scenarios, env_, llm_, options_);
  }

 private:
  const EnvironmentInterface& env_;
  ChatBackend& llm_;
  EvaluateOptions options_;
};

/// Appends one child produced by `optimizer` from the node's knowledge, its
/// experience path, its stored trajectories and its existing children's
/// modifications. Throws ArgumentError when the node is already at `width`;
/// wraps optimizer failures in ExpansionError leaving the tree unchanged.
NodeId expand(SearchTree& tree, NodeId node_id, KnowledgeOptimizer& optimizer, int width);

/// Indices of the scenarios one simulation evaluates (ascending order).
std::vector<std::size_t> draw_evaluation_sample(Rng& rng, std::size_t scenario_count,
                                                const SearchConfig& config);

/// Trajectories kept on a node: failures first, each group in scenario
/// order, at most `cap`.
std::vector<Trajectory> keep_trajectories(const std::vector<Trajectory>& all, int cap);

/// Evaluates the node on a seeded scenario sample, stores its score and
/// trajectories, and returns score - parent score. Throws ArgumentError for
/// an empty scenario list or a node without a scored parent; environment
/// failures raise SimulationError and leave the node untouched.
double simulate(SearchTree& tree, NodeId node_id, KnowledgeEvaluator& evaluator,
                const std::vector<Scenario>& scenarios, const SearchConfig& config, Rng& rng);

/// visits += 1 and total_reward += reward on every node from `node_id` to the root.
void backpropagate(SearchTree& tree, NodeId node_id, double reward);

/// Resumable search state: tree, configuration and the random engine.
class MctsSearch {
 public:
  using Progress = std::function<void(const IterationRecord&)>;

  /// Evaluates `initial` on a sample drawn from the seeded engine and builds
  /// the root. Throws ArgumentError if the knowledge does not validate or the
  /// scenario list is empty.
  MctsSearch(const Toolkit& toolkit, ActionKnowledge initial, const std::vector<Scenario>& scenarios,
             KnowledgeEvaluator& evaluator, KnowledgeOptimizer& optimizer, SearchConfig config);

  /// Continues from a saved tree and engine state.
  MctsSearch(const std::vector<Scenario>& scenarios, KnowledgeEvaluator& evaluator,
             KnowledgeOptimizer& optimizer, SearchConfig config, SearchTree tree, Rng rng);

  /// One select/expand/simulate/backpropagate iteration. On failure the tree
  /// and engine are restored to their state before the call.
  IterationRecord step();

  /// Steps until the tree has completed `max_iterations` iterations, or
  /// `stop_after` iterations when that is smaller.
  void run(const Progress& progress = {}, std::optional<int> stop_after = std::nullopt);

  bool done() const { return tree_.iteration >= config_.max_iterations; }
  const SearchTree& tree() const noexcept { return tree_; }
  const SearchConfig& config() const noexcept { return config_; }
  const Rng& rng() const noexcept { return rng_; }
  std::size_t scenario_count() const noexcept { return scenarios_.size(); }

  NodeId best_node() const;
  const ActionKnowledge& best_knowledge() const { return tree_.node(best_node()).knowledge; }

  Checkpoint checkpoint() const;

 private:
  const std::vector<Scenario>& scenarios_;
  KnowledgeEvaluator& evaluator_;
  KnowledgeOptimizer& optimizer_;
  SearchConfig config_;
  SearchTree tree_;
  Rng rng_;
};

struct SearchOutcome {
  SearchTree tree;
  ActionKnowledge best;
};

/// Baseline evaluation, root construction and max_iterations rounds. When
/// `checkpoint_on_error` is set and an iteration fails, the pre-error state
/// is written there before the error propagates.
SearchOutcome run_search(const Toolkit& toolkit, const ActionKnowledge& initial,
                         const std::vector<Scenario>& scenarios, KnowledgeEvaluator& evaluator,
                         KnowledgeOptimizer& optimizer, const SearchConfig& config,
                         const MctsSearch::Progress& progress = {},
                         const std::optional<std::filesystem::path>& checkpoint_on_error = std::nullopt);

}  // namespace synworld
