#include "synworld/checkpoint.hpp"

namespace synworld {

// Friend of SearchTree; rebuilds the private node table.
class TreeLoader {
 public:
  static SearchTree build(std::vector<MctsNode> nodes) {
    SearchTree tree;
    tree.nodes_ = std::move(nodes);
    return tree;
  }
};

namespace {

Json optional_score(const std::optional<double>& score) {
  return score ? Json(*score) : Json(nullptr);
}

}  // namespace

Json to_json(const SearchConfig& config) {
  return Json{{"width", config.width},
              {"max_iterations", config.max_iterations},
              {"exploration_c", config.exploration_c},
              {"eval_sample_size", config.eval_sample_size},
              {"full_evaluation", config.full_evaluation},
              {"trajectory_cap", config.trajectory_cap},
              {"seed", config.seed},
              {"mode", std::string(to_string(config.mode))},
              {"max_steps", config.max_steps}};
}

SearchConfig search_config_from_json(const Json& j, std::string_view where) {
  SearchConfig c;
  c.width = read_field_or<int>(j, "width", where, c.width);
  c.max_iterations = read_field_or<int>(j, "max_iterations", where, c.max_iterations);
  c.exploration_c = read_field_or<double>(j, "exploration_c", where, c.exploration_c);
  c.eval_sample_size = read_field_or<int>(j, "eval_sample_size", where, c.eval_sample_size);
  c.full_evaluation = read_field_or<bool>(j, "full_evaluation", where, c.full_evaluation);
  c.trajectory_cap = read_field_or<int>(j, "trajectory_cap", where, c.trajectory_cap);
  c.seed = read_field_or<std::uint64_t>(j, "seed", where, c.seed);
  auto mode_text = read_field_or<std::string>(j, "mode", where, std::string(to_string(c.mode)));
  auto mode = parse_optimize_mode(mode_text);
  if (!mode) throw FormatError(std::string(where) + ".mode: unknown mode '" + mode_text + "'");
  c.mode = *mode;
  c.max_steps = read_field_or<int>(j, "max_steps", where, c.max_steps);
  return c;
}

Json to_json(const SearchTree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes()) {
    Json trajectories = Json::array();
    for (const auto& t : n.trajectories) trajectories.push_back(to_json(t));
    nodes.push_back(Json{{"node_id", n.node_id},
                         {"parent", n.parent ? Json(*n.parent) : Json(nullptr)},
                         {"children", n.children},
                         {"visits", n.visits},
                         {"total_reward", n.total_reward},
                         {"score", optional_score(n.score)},
                         {"modification", n.modification},
                         {"knowledge", to_json(n.knowledge)},
                         {"trajectories", trajectories}});
  }
  Json history = Json::array();
  for (const auto& r : tree.history) {
    history.push_back(Json{{"iteration", r.iteration},
                           {"selected", r.selected},
                           {"new_node", r.new_node},
                           {"reward", r.reward},
                           {"node_score", r.node_score},
                           {"best_score", r.best_score}});
  }
  return Json{{"root", tree.root()}, {"iteration", tree.iteration}, {"nodes", nodes}, {"history", history}};
}

SearchTree search_tree_from_json(const Json& j, std::string_view where) {
  const std::string base(where);
  if (read_field<int>(j, "root", where) != 0) throw FormatError(base + ".root: root must be node 0");
  auto nodes_json = read_field<Json>(j, "nodes", where);
  if (!nodes_json.is_array()) throw FormatError(base + ".nodes: expected an array");

  std::vector<MctsNode> nodes;
  for (std::size_t i = 0; i < nodes_json.size(); ++i) {
    const Json& nj = nodes_json[i];
    const std::string w = base + ".nodes[" + std::to_string(i) + "]";
    MctsNode n;
    n.node_id = read_field<int>(nj, "node_id", w);
    auto parent = read_field<Json>(nj, "parent", w);
    if (!parent.is_null()) n.parent = read_field<int>(nj, "parent", w);
    n.children = read_field<std::vector<int>>(nj, "children", w);
    n.visits = read_field<int>(nj, "visits", w);
    n.total_reward = read_field<double>(nj, "total_reward", w);
    auto score = read_field<Json>(nj, "score", w);
    if (!score.is_null()) n.score = read_field<double>(nj, "score", w);
    n.modification = read_field<std::string>(nj, "modification", w);
    n.knowledge = knowledge_from_json(read_field<Json>(nj, "knowledge", w), w + ".knowledge");
    auto trajectories = read_field<Json>(nj, "trajectories", w);
    if (!trajectories.is_array()) throw FormatError(w + ".trajectories: expected an array");
    for (std::size_t k = 0; k < trajectories.size(); ++k)
      n.trajectories.push_back(
          trajectory_from_json(trajectories[k], w + ".trajectories[" + std::to_string(k) + "]"));
    nodes.push_back(std::move(n));
  }

  SearchTree tree = TreeLoader::build(std::move(nodes));
  try {
    tree.check_consistency();
  } catch (const FormatError& e) {
    throw FormatError(base + "." + e.what());
  }
  tree.iteration = read_field<int>(j, "iteration", where);
  auto history = read_field<Json>(j, "history", where);
  if (!history.is_array()) throw FormatError(base + ".history: expected an array");
  for (std::size_t i = 0; i < history.size(); ++i) {
    const std::string w = base + ".history[" + std::to_string(i) + "]";
    tree.history.push_back({read_field<int>(history[i], "iteration", w),
                            read_field<int>(history[i], "selected", w),
                            read_field<int>(history[i], "new_node", w),
                            read_field<double>(history[i], "reward", w),
                            read_field<double>(history[i], "node_score", w),
                            read_field<double>(history[i], "best_score", w)});
  }
  return tree;
}

Json to_json(const Checkpoint& checkpoint) {
  return Json{{"schema_version", kCheckpointSchemaVersion},
              {"config", to_json(checkpoint.config)},
              {"scenario_count", checkpoint.scenario_count},
              {"rng_state", checkpoint.rng_state},
              {"tree", to_json(checkpoint.tree)}};
}

Checkpoint checkpoint_from_json(const Json& j) {
  int version = read_field<int>(j, "schema_version", "checkpoint");
  if (version != kCheckpointSchemaVersion)
    throw FormatError("checkpoint.schema_version: unsupported version " + std::to_string(version));
  Checkpoint c;
  c.config = search_config_from_json(read_field<Json>(j, "config", "checkpoint"), "checkpoint.config");
  c.scenario_count = read_field<std::size_t>(j, "scenario_count", "checkpoint");
  c.rng_state = read_field<std::string>(j, "rng_state", "checkpoint");
  c.tree = search_tree_from_json(read_field<Json>(j, "tree", "checkpoint"), "checkpoint.tree");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_json_file(path, to_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_json_file(path));
}

}  // namespace synworld
