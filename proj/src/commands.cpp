#include "synworld/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>

#include "synworld/checkpoint.hpp"
#include "synworld/environment.hpp"
#include "synworld/error.hpp"
#include "synworld/http_backend.hpp"
#include "synworld/json_io.hpp"
#include "synworld/mcts.hpp"
#include "synworld/optimizer.hpp"

namespace synworld {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
  if (value.empty()) return {};
  fs::path p(value);
  return p.is_absolute() ? p : base / p;
}

SynthesisConfig synthesis_config_from_json(const Json& j) {
  constexpr std::string_view w = "config.synthesis";
  SynthesisConfig c;
  c.scenarios_per_subset = read_field_or<int>(j, "scenarios_per_subset", w, c.scenarios_per_subset);
  c.similarity_threshold = read_field_or<double>(j, "similarity_threshold", w, c.similarity_threshold);
  c.target_scenario_count = read_field_or<int>(j, "target_scenario_count", w, c.target_scenario_count);
  c.min_subset_size = read_field_or<int>(j, "min_subset_size", w, c.min_subset_size);
  c.max_subset_size = read_field_or<int>(j, "max_subset_size", w, c.max_subset_size);
  c.seed = read_field_or<std::uint64_t>(j, "seed", w, c.seed);
  c.temperature = read_field_or<double>(j, "temperature", w, c.temperature);
  return c;
}

BackendSettings backend_from_json(const Json& j) {
  constexpr std::string_view w = "config.backend";
  BackendSettings b;
  auto kind = read_field_or<std::string>(j, "kind", w, "simulated");
  if (kind == "simulated") b.kind = BackendKind::Simulated;
  else if (kind == "http") b.kind = BackendKind::Http;
  else throw FormatError("config.backend.kind: unknown backend '" + kind + "'");
  b.base_url = read_field_or<std::string>(j, "base_url", w, b.base_url);
  b.model = read_field_or<std::string>(j, "model", w, b.model);
  b.max_retries = read_field_or<int>(j, "max_retries", w, b.max_retries);
  b.timeout_seconds = read_field_or<int>(j, "timeout_seconds", w, b.timeout_seconds);
  b.simulated.repair_descriptions =
      read_field_or<bool>(j, "repair_descriptions", w, b.simulated.repair_descriptions);
  b.simulated.repair_workflow = read_field_or<bool>(j, "repair_workflow", w, b.simulated.repair_workflow);
  return b;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const TransportError*>(&e) || dynamic_cast<const OptimizerError*>(&e) ||
      dynamic_cast<const ExpansionError*>(&e) || dynamic_cast<const SimulationError*>(&e) ||
      dynamic_cast<const SynthesisError*>(&e) || dynamic_cast<const EnvironmentError*>(&e))
    return kExitBackend;
  return kExitInput;
}

// One writer per output directory.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / ".synworld.lock") {
    fs::create_directories(dir);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) throw ConfigError("output directory is in use (lock file " + path_.string() + ")");
    std::fclose(f);
  }
  ~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
};

std::unique_ptr<ChatBackend> make_backend(const BackendSettings& settings, std::uint64_t seed) {
  if (settings.kind == BackendKind::Simulated) return std::make_unique<SimulatedLlm>(settings.simulated);
  HttpBackendConfig c;
  c.base_url = settings.base_url;
  c.model = settings.model;
  c.max_retries = settings.max_retries;
  c.timeout = std::chrono::seconds(settings.timeout_seconds);
  c.jitter_seed = seed;
  const char* key = std::getenv(std::string(kApiKeyEnv).c_str());
  if (key == nullptr || *key == '\0') throw ConfigError(std::string(kApiKeyEnv) + " is not set");
  c.api_key = key;
  return std::make_unique<HttpBackend>(std::move(c));
}

Toolkit load_run_toolkit(const RunConfig& cfg) {
  if (!cfg.toolkit.empty()) return load_toolkit(cfg.toolkit);
  if (!cfg.env.empty()) return load_simenv(cfg.env).toolkit;
  throw ArgumentError("no toolkit given (--toolkit or --env)");
}

SimEnvDefinition load_run_env(const RunConfig& cfg) {
  if (cfg.environment == EnvironmentKind::Live)
    throw ConfigError("no live environment adapter is bundled; use the simulated environment");
  if (cfg.env.empty()) throw ArgumentError("no environment definition given (--env)");
  return load_simenv(cfg.env);
}

std::vector<Scenario> load_run_scenarios(const RunConfig& cfg) {
  if (cfg.scenarios.empty()) throw ArgumentError("no scenario store given (--scenarios)");
  auto scenarios = load_scenarios(cfg.scenarios);
  if (scenarios.empty()) throw ArgumentError("scenario store " + cfg.scenarios.string() + " is empty");
  return scenarios;
}

void require_toolkit_match(const Toolkit& toolkit, const EnvironmentInterface& env) {
  if (toolkit.ids() != env.toolkit().ids())
    throw ArgumentError("toolkit and environment list different tools");
}

// Treats a sample on which every episode lost its backend as a backend failure.
class CheckedEvaluator final : public KnowledgeEvaluator {
 public:
  CheckedEvaluator(const EnvironmentInterface& env, ChatBackend& llm, EvaluateOptions options)
      : inner_(env, llm, options) {}

  EvaluationResult evaluate(const ActionKnowledge& ak, const std::vector<Scenario>& scenarios) override {
    auto result = inner_.evaluate(ak, scenarios);
    if (!result.trajectories.empty() && result.errors == result.trajectories.size())
      throw TransportError("every episode failed: " + result.trajectories.front().error.value_or(""));
    return result;
  }

 private:
  AgentEvaluator inner_;
};

std::string progress_csv(const SearchTree& tree) {
  std::string out = "iteration,node_id,reward,node_score,best_score\n";
  for (const auto& r : tree.history) {
    out += std::to_string(r.iteration) + "," + std::to_string(r.new_node) + "," + format_fixed(r.reward, 6) +
           "," + format_fixed(r.node_score, 6) + "," + format_fixed(r.best_score, 6) + "\n";
  }
  return out;
}

std::string best_path_summary(const SearchTree& tree) {
  std::ostringstream out;
  auto best = tree.best_node();
  if (!best) return "no scored node\n";
  auto path = tree.path_to_root(*best);
  std::reverse(path.begin(), path.end());
  std::optional<double> prev;
  for (NodeId id : path) {
    const auto& n = tree.node(id);
    double score = n.score.value_or(0.0);
    out << "node " << id << " score=" << format_fixed(score);
    if (prev) out << " delta=" << format_fixed(score - *prev);
    out << ": " << (n.modification.empty() ? "(initial knowledge)" : n.modification) << "\n";
    prev = score;
  }
  return out.str();
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  Toolkit toolkit = load_run_toolkit(cfg);
  validate_synthesis_config(cfg.synthesis, toolkit);
  OutputLock lock(cfg.output_dir);
  auto llm = make_backend(cfg.backend, cfg.synthesis.seed);
  auto outcome = run_synthesis(toolkit, cfg.synthesis, *llm);

  save_scenarios(cfg.output_dir / "scenarios.json", outcome.scenarios);
  Json rejected = Json::array();
  for (const auto& r : outcome.report.rejected)
    rejected.push_back(Json{{"scenario_id", r.scenario.scenario_id},
                            {"max_similarity", r.max_similarity},
                            {"closest_id", r.closest_id}});
  write_json_file(cfg.output_dir / "synthesis_report.json",
                  Json{{"subsets", outcome.report.subsets},
                       {"generated", outcome.report.generated},
                       {"accepted", outcome.report.accepted},
                       {"rejected_count", outcome.report.rejected.size()},
                       {"rejected", rejected}});
  out << "subsets=" << outcome.report.subsets << " generated=" << outcome.report.generated
      << " accepted=" << outcome.report.accepted << " rejected=" << outcome.report.rejected.size() << "\n";
  return kExitOk;
}

int cmd_optimize(const RunConfig& cfg, const std::optional<fs::path>& resume,
                 std::optional<int> stop_after, std::ostream& out) {
  Toolkit toolkit = load_run_toolkit(cfg);
  SimEnv env(load_run_env(cfg));
  require_toolkit_match(toolkit, env);
  auto scenarios = load_run_scenarios(cfg);
  PromptTemplates templates = cfg.prompts_dir.empty() ? PromptTemplates::defaults()
                                                      : PromptTemplates::load(cfg.prompts_dir);

  std::optional<Checkpoint> saved;
  if (resume) {
    saved = load_checkpoint(*resume);
    if (saved->scenario_count != scenarios.size())
      throw ArgumentError("checkpoint was written for " + std::to_string(saved->scenario_count) +
                          " scenarios, the store has " + std::to_string(scenarios.size()));
  }
  const SearchConfig config = saved ? saved->config : cfg.search;
  validate_search_config(config);

  OutputLock lock(cfg.output_dir);
  auto llm = make_backend(cfg.backend, config.seed);
  EvaluateOptions eval_options;
  eval_options.episode.max_steps = config.max_steps;
  eval_options.workers = cfg.workers;
  CheckedEvaluator evaluator(env, *llm, eval_options);
  OptimizeOptions opt_options;
  opt_options.mode = config.mode;
  opt_options.templates = templates;
  LlmKnowledgeOptimizer optimizer(toolkit, *llm, opt_options);

  std::unique_ptr<MctsSearch> search;
  if (saved) {
    Rng rng;
    set_rng_state(rng, saved->rng_state);
    search = std::make_unique<MctsSearch>(scenarios, evaluator, optimizer, config, saved->tree, rng);
  } else {
    ActionKnowledge initial = cfg.initial_knowledge.empty()
                                  ? ActionKnowledge::from_toolkit(toolkit, cfg.initial_workflow)
                                  : load_knowledge(cfg.initial_knowledge);
    search = std::make_unique<MctsSearch>(toolkit, initial, scenarios, evaluator, optimizer, config);
  }

  const fs::path checkpoint_path = cfg.output_dir / "checkpoint.json";
  auto persist = [&] {
    save_checkpoint(checkpoint_path, search->checkpoint());
    write_text_file(cfg.output_dir / "progress.csv", progress_csv(search->tree()));
  };
  persist();
  while (!search->done() && (!stop_after || search->tree().iteration < *stop_after)) {
    try {
      const auto record = search->step();
      out << "iteration " << record.iteration << ": node " << record.new_node
          << " score=" << format_fixed(record.node_score) << " best=" << format_fixed(record.best_score) << "\n";
    } catch (const Error&) {
      persist();
      throw;
    }
    persist();
  }
  save_knowledge(cfg.output_dir / "best_knowledge.json", search->best_knowledge());
  const NodeId best = search->best_node();
  out << "best node " << best << " score=" << format_fixed(search->tree().node(best).score.value_or(0.0))
      << " after " << search->tree().iteration << " iterations\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, const fs::path& knowledge_path, std::ostream& out) {
  Toolkit toolkit = load_run_toolkit(cfg);
  SimEnv env(load_run_env(cfg));
  require_toolkit_match(toolkit, env);
  auto scenarios = load_run_scenarios(cfg);
  ActionKnowledge ak = load_knowledge(knowledge_path);
  auto v = validate_action_knowledge(ak, toolkit);
  if (!v.ok()) throw ArgumentError("knowledge does not validate: " + v.violations.front());

  OutputLock lock(cfg.output_dir);
  auto llm = make_backend(cfg.backend, cfg.search.seed);
  EvaluateOptions options;
  options.episode.max_steps = cfg.search.max_steps;
  options.workers = cfg.workers;
  CheckedEvaluator evaluator(env, *llm, options);
  auto result = evaluator.evaluate(ak, scenarios);

  const double rounded = std::round(result.pass_rate * 10000.0) / 10000.0;
  Json results = Json::array();
  Json trajectories = Json::array();
  for (const auto& t : result.trajectories) {
    Json r{{"scenario_id", t.scenario_id}, {"score", t.score}, {"steps", t.steps.size()}};
    if (t.error) r["error"] = *t.error;
    results.push_back(r);
    trajectories.push_back(to_json(t));
  }
  write_json_file(cfg.output_dir / "eval_report.json",
                  Json{{"pass_rate", rounded},
                       {"passed", result.passed},
                       {"total", result.trajectories.size()},
                       {"errors", result.errors},
                       {"results", results}});
  write_json_file(cfg.output_dir / "trajectories.json", Json{{"trajectories", trajectories}});
  out << "pass_rate: " << format_fixed(result.pass_rate) << " (" << result.passed << "/"
      << result.trajectories.size() << ")\n";
  return kExitOk;
}

int cmd_report(const RunConfig& cfg, const std::vector<fs::path>& checkpoints, std::ostream& out) {
  std::vector<Checkpoint> runs;
  for (const auto& p : checkpoints) {
    try {
      runs.push_back(load_checkpoint(p));
    } catch (const FormatError& e) {
      throw FormatError(p.string() + ": " + e.what());
    }
  }
  OutputLock lock(cfg.output_dir);

  std::string iterations = "run,iteration,node_id,reward,node_score,best_score\n";
  std::string summary;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& tree = runs[i].tree;
    for (const auto& r : tree.history) {
      iterations += std::to_string(i) + "," + std::to_string(r.iteration) + "," + std::to_string(r.new_node) +
                    "," + format_fixed(r.reward, 6) + "," + format_fixed(r.node_score, 6) + "," +
                    format_fixed(r.best_score, 6) + "\n";
    }
    summary += "run " + std::to_string(i) + " (" + checkpoints[i].string() + ", " +
               std::to_string(runs[i].scenario_count) + " scenarios, " + std::to_string(tree.iteration) +
               " iterations)\n" + best_path_summary(tree) + "\n";
  }
  write_text_file(cfg.output_dir / "iterations.csv", iterations);
  write_text_file(cfg.output_dir / "best_path.txt", summary);

  if (runs.size() > 1) {
    std::string curve = "run,scenario_count,root_score,best_score\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& tree = runs[i].tree;
      auto best = tree.best_node();
      curve += std::to_string(i) + "," + std::to_string(runs[i].scenario_count) + "," +
               format_fixed(tree.node(tree.root()).score.value_or(0.0), 6) + "," +
               format_fixed(best ? tree.node(*best).score.value_or(0.0) : 0.0, 6) + "\n";
    }
    write_text_file(cfg.output_dir / "scenario_count.csv", curve);
  }
  out << summary;
  return kExitOk;
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
  const Json j = read_json_file(path);
  if (!j.is_object()) throw FormatError("config: expected an object");
  const fs::path base = path.parent_path();
  constexpr std::string_view w = "config";
  RunConfig cfg;
  cfg.toolkit = resolve(base, read_field_or<std::string>(j, "toolkit", w, ""));
  cfg.scenarios = resolve(base, read_field_or<std::string>(j, "scenarios", w, ""));
  cfg.env = resolve(base, read_field_or<std::string>(j, "env", w, ""));
  cfg.prompts_dir = resolve(base, read_field_or<std::string>(j, "prompts_dir", w, ""));
  cfg.initial_knowledge = resolve(base, read_field_or<std::string>(j, "initial_knowledge", w, ""));
  if (j.contains("output_dir")) cfg.output_dir = resolve(base, read_field<std::string>(j, "output_dir", w));
  cfg.initial_workflow = read_field_or<std::string>(j, "initial_workflow", w, "");
  auto env_kind = read_field_or<std::string>(j, "environment", w, "sim");
  if (env_kind == "sim") cfg.environment = EnvironmentKind::Sim;
  else if (env_kind == "live") cfg.environment = EnvironmentKind::Live;
  else throw FormatError("config.environment: unknown environment '" + env_kind + "'");
  cfg.workers = read_field_or<int>(j, "workers", w, cfg.workers);
  if (cfg.workers < 1) throw FormatError("config.workers: must be >= 1");
  if (j.contains("synthesis")) cfg.synthesis = synthesis_config_from_json(j.at("synthesis"));
  if (j.contains("search")) cfg.search = search_config_from_json(j.at("search"), "config.search");
  if (j.contains("backend")) cfg.backend = backend_from_json(j.at("backend"));
  return cfg;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scenario synthesis and action-knowledge search for tool-using agents", "synworld"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, toolkit, scenarios, env, out_dir, prompts, knowledge, backend, mode, resume;
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations, stop_after, target, per_subset;
    std::vector<std::string> checkpoints;
  } f;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", f.config, "Run configuration (JSON)");
    cmd->add_option("--seed", f.seed, "Seed for every random draw");
    cmd->add_option("--out", f.out_dir, "Output directory");
    cmd->add_option("--backend", f.backend, "LLM backend")->check(CLI::IsMember({"simulated", "http"}));
  };
  auto inputs = [&](CLI::App* cmd) {
    cmd->add_option("--toolkit", f.toolkit, "Toolkit file");
    cmd->add_option("--scenarios", f.scenarios, "Scenario store");
    cmd->add_option("--env", f.env, "Simulated environment definition");
  };

  auto* synth = app.add_subcommand("synth", "Synthesize a deduplicated scenario store");
  common(synth);
  synth->add_option("--toolkit", f.toolkit, "Toolkit file");
  synth->add_option("--env", f.env, "Simulated environment definition (its tools are used)");
  synth->add_option("--target", f.target, "Target scenario count");
  synth->add_option("--per-subset", f.per_subset, "Scenarios per tool subset");

  auto* optimize = app.add_subcommand("optimize", "Search for better action knowledge");
  common(optimize);
  inputs(optimize);
  optimize->add_option("--mode", f.mode, "What to rewrite")
      ->check(CLI::IsMember({"both", "description-only", "workflow-only"}));
  optimize->add_option("--knowledge", f.knowledge, "Initial action knowledge");
  optimize->add_option("--prompts", f.prompts, "Directory of prompt template files");
  optimize->add_option("--iterations", f.iterations, "Search iterations");
  optimize->add_option("--stop-after", f.stop_after, "Stop once this many iterations are complete");
  optimize->add_option("--resume", f.resume, "Checkpoint to continue from");

  auto* eval = app.add_subcommand("eval", "Evaluate action knowledge on a scenario store");
  common(eval);
  inputs(eval);
  eval->add_option("--knowledge", f.knowledge, "Action knowledge to evaluate")->required();

  auto* report = app.add_subcommand("report", "Summaries and plot data from checkpoints");
  report->add_option("--out", f.out_dir, "Output directory");
  report->add_option("checkpoints", f.checkpoints, "Checkpoint files")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_run_config(f.config);
    if (!f.toolkit.empty()) cfg.toolkit = f.toolkit;
    if (!f.scenarios.empty()) cfg.scenarios = f.scenarios;
    if (!f.env.empty()) cfg.env = f.env;
    if (!f.out_dir.empty()) cfg.output_dir = f.out_dir;
    if (!f.prompts.empty()) cfg.prompts_dir = f.prompts;
    if (!f.knowledge.empty()) cfg.initial_knowledge = f.knowledge;
    if (f.seed) cfg.synthesis.seed = cfg.search.seed = *f.seed;
    if (!f.backend.empty()) cfg.backend.kind = f.backend == "http" ? BackendKind::Http : BackendKind::Simulated;
    if (!f.mode.empty()) cfg.search.mode = *parse_optimize_mode(f.mode);
    if (f.iterations) cfg.search.max_iterations = *f.iterations;
    if (f.target) cfg.synthesis.target_scenario_count = *f.target;
    if (f.per_subset) cfg.synthesis.scenarios_per_subset = *f.per_subset;

    if (synth->parsed()) return cmd_synth(cfg, out);
    if (optimize->parsed()) {
      std::optional<fs::path> resume;
      if (!f.resume.empty()) resume = f.resume;
      return cmd_optimize(cfg, resume, f.stop_after, out);
    }
    if (eval->parsed()) return cmd_eval(cfg, f.knowledge, out);
    std::vector<fs::path> paths(f.checkpoints.begin(), f.checkpoints.end());
    return cmd_report(cfg, paths, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace synworld
