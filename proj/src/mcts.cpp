#include "synworld/mcts.hpp"

#include <algorithm>
#include <cmath>

#include "synworld/error.hpp"

namespace synworld {

double ucb_value(const MctsNode& child, int parent_visits, double c) {
  if (parent_visits < 1) throw ArgumentError("parent_visits must be >= 1");
  if (child.visits == 0) return kUnvisitedUcb;
  const double n = static_cast<double>(child.visits);
  return child.total_reward / n + c * std::sqrt(std::log(static_cast<double>(parent_visits)) / n);
}

NodeId select_node(const SearchTree& tree, double c, int width) {
  NodeId current = tree.root();
  while (true) {
    const MctsNode& node = tree.node(current);
    if (static_cast<int>(node.children.size()) < width) return current;
    NodeId best = node.children.front();
    double best_value = -std::numeric_limits<double>::infinity();
    for (NodeId child : node.children) {
      double value = ucb_value(tree.node(child), std::max(1, node.visits), c);
      if (value > best_value || (value == best_value && child < best)) {
        best_value = value;
        best = child;
      }
    }
    current = best;
  }
}

NodeId expand(SearchTree& tree, NodeId node_id, KnowledgeOptimizer& optimizer, int width) {
  const MctsNode& node = tree.node(node_id);
  if (static_cast<int>(node.children.size()) >= width)
    throw ArgumentError("node " + std::to_string(node_id) + " already has " +
                        std::to_string(node.children.size()) + " children");

  OptimizeInput input;
  input.knowledge = node.knowledge;
  input.experiences = collect_experience_path(tree, node_id);
  input.trajectories = node.trajectories;
  for (NodeId child : node.children) input.sibling_modifications.push_back(tree.node(child).modification);

  OptimizeResult result;
  try {
    result = optimizer.propose(input);
  } catch (const Error& e) {
    throw ExpansionError("expanding node " + std::to_string(node_id) + " failed: " + e.what());
  }
  return tree.add_child(node_id, std::move(result.knowledge), std::move(result.modification));
}

std::vector<std::size_t> draw_evaluation_sample(Rng& rng, std::size_t scenario_count,
                                                const SearchConfig& config) {
  if (config.full_evaluation) return sample_indices(rng, scenario_count, scenario_count);
  return sample_indices(rng, scenario_count, static_cast<std::size_t>(config.eval_sample_size));
}

std::vector<Trajectory> keep_trajectories(const std::vector<Trajectory>& all, int cap) {
  std::vector<Trajectory> kept;
  const auto limit = static_cast<std::size_t>(std::max(cap, 0));
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& t : all) {
      if (kept.size() == limit) return kept;
      bool failed = t.score < 1.0;
      if ((pass == 0) == failed) kept.push_back(t);
    }
  }
  return kept;
}

namespace {

EvaluationResult evaluate_sample(KnowledgeEvaluator& evaluator, const ActionKnowledge& ak,
                                 const std::vector<Scenario>& scenarios, const SearchConfig& config,
                                 Rng& rng) {
  if (scenarios.empty()) throw ArgumentError("simulation needs at least one scenario");
  std::vector<Scenario> sample;
  for (std::size_t i : draw_evaluation_sample(rng, scenarios.size(), config)) sample.push_back(scenarios[i]);
  try {
    return evaluator.evaluate(ak, sample);
  } catch (const EnvironmentError& e) {
    throw SimulationError(std::string("environment failure: ") + e.what());
  }
}

}  // namespace

double simulate(SearchTree& tree, NodeId node_id, KnowledgeEvaluator& evaluator,
                const std::vector<Scenario>& scenarios, const SearchConfig& config, Rng& rng) {
  if (scenarios.empty()) throw ArgumentError("simulation needs at least one scenario");
  const MctsNode& node = tree.node(node_id);
  if (!node.parent || !tree.node(*node.parent).score)
    throw ArgumentError("node " + std::to_string(node_id) + " has no scored parent");

  EvaluationResult result = evaluate_sample(evaluator, node.knowledge, scenarios, config, rng);

  MctsNode& target = tree.node(node_id);
  target.score = result.pass_rate;
  target.trajectories = keep_trajectories(result.trajectories, config.trajectory_cap);
  return *target.score - *tree.node(*target.parent).score;
}

void backpropagate(SearchTree& tree, NodeId node_id, double reward) {
  for (NodeId id : tree.path_to_root(node_id)) {
    MctsNode& n = tree.node(id);
    n.visits += 1;
    n.total_reward += reward;
  }
}

MctsSearch::MctsSearch(const Toolkit& toolkit, ActionKnowledge initial,
                       const std::vector<Scenario>& scenarios, KnowledgeEvaluator& evaluator,
                       KnowledgeOptimizer& optimizer, SearchConfig config)
    : scenarios_(scenarios),
      evaluator_(evaluator),
      optimizer_(optimizer),
      config_(config),
      rng_(config.seed) {
  validate_search_config(config_);
  if (scenarios_.empty()) throw ArgumentError("search needs at least one scenario");
  if (auto v = validate_action_knowledge(initial, toolkit); !v.ok())
    throw ArgumentError("invalid initial action knowledge: " + v.violations.front());

  EvaluationResult baseline = evaluate_sample(evaluator_, initial, scenarios_, config_, rng_);
  tree_ = init_tree(std::move(initial), baseline.pass_rate);
  tree_.node(tree_.root()).trajectories = keep_trajectories(baseline.trajectories, config_.trajectory_cap);
}

MctsSearch::MctsSearch(const std::vector<Scenario>& scenarios, KnowledgeEvaluator& evaluator,
                       KnowledgeOptimizer& optimizer, SearchConfig config, SearchTree tree, Rng rng)
    : scenarios_(scenarios),
      evaluator_(evaluator),
      optimizer_(optimizer),
      config_(config),
      tree_(std::move(tree)),
      rng_(rng) {
  validate_search_config(config_);
  if (scenarios_.empty()) throw ArgumentError("search needs at least one scenario");
  tree_.check_consistency();
}

IterationRecord MctsSearch::step() {
  const Rng saved_rng = rng_;
  const NodeId selected = select_node(tree_, config_.exploration_c, config_.width);
  const NodeId child = expand(tree_, selected, optimizer_, config_.width);

  double reward = 0.0;
  try {
    reward = simulate(tree_, child, evaluator_, scenarios_, config_, rng_);
  } catch (...) {
    tree_.remove_last();
    rng_ = saved_rng;
    throw;
  }
  backpropagate(tree_, child, reward);
  tree_.iteration += 1;

  IterationRecord record{tree_.iteration, selected, child, reward, *tree_.node(child).score,
                         *tree_.node(best_node()).score};
  tree_.history.push_back(record);
  return record;
}

void MctsSearch::run(const Progress& progress, std::optional<int> stop_after) {
  int limit = config_.max_iterations;
  if (stop_after) limit = std::min(limit, *stop_after);
  while (tree_.iteration < limit) {
    IterationRecord record = step();
    if (progress) progress(record);
  }
}

NodeId MctsSearch::best_node() const {
  auto best = tree_.best_node();
  return best ? *best : tree_.root();
}

Checkpoint MctsSearch::checkpoint() const {
  return Checkpoint{config_, tree_, rng_state(rng_), scenarios_.size()};
}

SearchOutcome run_search(const Toolkit& toolkit, const ActionKnowledge& initial,
                         const std::vector<Scenario>& scenarios, KnowledgeEvaluator& evaluator,
                         KnowledgeOptimizer& optimizer, const SearchConfig& config,
                         const MctsSearch::Progress& progress,
                         const std::optional<std::filesystem::path>& checkpoint_on_error) {
  MctsSearch search(toolkit, initial, scenarios, evaluator, optimizer, config);
  try {
    search.run(progress);
  } catch (const Error&) {
    if (checkpoint_on_error) save_checkpoint(*checkpoint_on_error, search.checkpoint());
    throw;
  }
  return {search.tree(), search.best_knowledge()};
}

}  // namespace synworld
