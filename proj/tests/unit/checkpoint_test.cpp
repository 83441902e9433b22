#include <gtest/gtest.h>

#include "synworld/checkpoint.hpp"
#include "synworld/error.hpp"
#include "synworld/mcts.hpp"
#include "synworld/simulated_llm.hpp"
#include "test_support.hpp"

using namespace synworld;
using namespace synworld::testing;

namespace {

Checkpoint fixture_checkpoint(int iterations) {
  SimEnv env(fixture_env());
  SimulatedLlm llm;
  AgentEvaluator ev(env, llm);
  LlmKnowledgeOptimizer opt(env.toolkit(), llm);
  auto scenarios = fixture_scenarios();
  SearchConfig c;
  c.max_iterations = iterations;
  MctsSearch search(env.toolkit(), fixture_knowledge(), scenarios, ev, opt, c);
  search.run();
  return search.checkpoint();
}

}  // namespace

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  ScratchDir dir;
  auto cp = fixture_checkpoint(4);
  save_checkpoint(dir / "a.json", cp);
  auto loaded = load_checkpoint(dir / "a.json");
  EXPECT_EQ(loaded, cp);
  save_checkpoint(dir / "b.json", loaded);
  EXPECT_EQ(read_text_file(dir / "a.json"), read_text_file(dir / "b.json"));
}

TEST(Checkpoint, RecordsSchemaAndEngineState) {
  auto cp = fixture_checkpoint(2);
  Json j = to_json(cp);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["scenario_count"], 12);
  EXPECT_EQ(j["tree"]["iteration"], 2);
  Rng rng;
  set_rng_state(rng, cp.rng_state);
  EXPECT_EQ(rng_state(rng), cp.rng_state);
}

TEST(Checkpoint, RejectsUnknownSchemaVersion) {
  Json j = to_json(fixture_checkpoint(1));
  j["schema_version"] = 2;
  try {
    checkpoint_from_json(j);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("schema_version"), std::string::npos);
  }
}

TEST(Checkpoint, CorruptFieldIsNamed) {
  Json j = to_json(fixture_checkpoint(1));
  j["tree"]["nodes"][1]["visits"] = "many";
  try {
    checkpoint_from_json(j);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("checkpoint.tree.nodes[1].visits"), std::string::npos) << e.what();
  }
  j = to_json(fixture_checkpoint(1));
  j["tree"]["nodes"][1]["parent"] = 5;
  EXPECT_THROW(checkpoint_from_json(j), FormatError);
  j = to_json(fixture_checkpoint(1));
  j["config"]["mode"] = "everything";
  EXPECT_THROW(checkpoint_from_json(j), FormatError);
}

TEST(Checkpoint, ConfigRoundTrip) {
  SearchConfig c;
  c.mode = OptimizeMode::WorkflowOnly;
  c.seed = 123456789012345ull;
  c.full_evaluation = true;
  EXPECT_EQ(search_config_from_json(to_json(c)), c);
  for (auto m : {OptimizeMode::Both, OptimizeMode::DescriptionOnly, OptimizeMode::WorkflowOnly})
    EXPECT_EQ(parse_optimize_mode(to_string(m)), m);
}

TEST(JsonIo, ScenarioStoreRoundTrip) {
  ScratchDir dir;
  auto scenarios = fixture_scenarios();
  save_scenarios(dir / "s.json", scenarios);
  EXPECT_EQ(load_scenarios(dir / "s.json"), scenarios);
  EXPECT_THROW(load_scenarios(dir / "missing.json"), Error);
}

TEST(JsonIo, FormatFixed) {
  EXPECT_EQ(format_fixed(1.0 / 6.0), "0.1667");
  EXPECT_EQ(format_fixed(1.0, 0), "1");
}
