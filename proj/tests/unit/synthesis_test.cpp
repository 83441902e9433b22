#include <gtest/gtest.h>

#include "synworld/error.hpp"
#include "synworld/llm.hpp"
#include "synworld/simulated_llm.hpp"
#include "synworld/synthesis.hpp"
#include "test_support.hpp"

using namespace synworld;
using synworld::testing::simple_toolkit;

namespace {

class FailingBackend final : public ChatBackend {
 public:
  std::string complete(const ChatRequest&) override { throw TransportError("down", 503); }
};

}  // namespace

TEST(SynthesisConfig, SubsetCountIsCeiling) {
  SynthesisConfig c;
  EXPECT_EQ(required_subset_count(c), 67u);  // 200 / 3 rounded up
  c.target_scenario_count = 6;
  EXPECT_EQ(required_subset_count(c), 2u);
  c.scenarios_per_subset = 2;
  c.target_scenario_count = 7;
  EXPECT_EQ(required_subset_count(c), 4u);
}

TEST(SynthesisConfig, Validation) {
  Toolkit tk = simple_toolkit({"a", "b"});
  SynthesisConfig c;
  c.max_subset_size = 2;
  EXPECT_NO_THROW(validate_synthesis_config(c, tk));
  c.scenarios_per_subset = 4;
  EXPECT_THROW(validate_synthesis_config(c, tk), ArgumentError);
  c = {};
  EXPECT_THROW(validate_synthesis_config(c, tk), ArgumentError);  // max 4 > 2 tools
  c.max_subset_size = 2;
  c.similarity_threshold = 0.0;
  EXPECT_THROW(validate_synthesis_config(c, tk), ArgumentError);
}

TEST(SubsetLines, SkipsInvalidLines) {
  Toolkit tk = simple_toolkit({"a", "b", "c"});
  auto subsets = parse_subset_lines(
      "Here you go:\ntools: a, b\n1. tools: `c`\n- tools: a, a\ntools: a, zzz\ntools: a, b, c\n", tk, 1, 2);
  ASSERT_EQ(subsets.size(), 2u);
  EXPECT_EQ(subsets[0], (ToolSubset{"a", "b"}));
  EXPECT_EQ(subsets[1], (ToolSubset{"c"}));
}

TEST(SubsetSelection, FallsBackToSeededSampling) {
  Toolkit tk = simple_toolkit({"a", "b", "c", "d"});
  SynthesisConfig c;
  c.target_scenario_count = 12;
  c.max_subset_size = 3;
  c.seed = 11;
  ScriptedBackend llm;
  llm.otherwise("I cannot help with that.");
  auto first = select_tool_subsets(tk, c, llm);
  auto again = select_tool_subsets(tk, c, llm);
  ASSERT_EQ(first.size(), 4u);
  EXPECT_EQ(first, again);
  for (const auto& s : first) {
    EXPECT_GE(s.size(), 1u);
    EXPECT_LE(s.size(), 3u);
  }
}

TEST(SubsetSelection, TakesLlmProposalsFirst) {
  Toolkit tk = simple_toolkit({"a", "b", "c"});
  SynthesisConfig c;
  c.target_scenario_count = 6;
  c.max_subset_size = 3;
  ScriptedBackend llm;
  llm.on(std::string(kSubsetPromptMarker), "tools: a, c\ntools: b\ntools: c\n");
  auto subsets = select_tool_subsets(tk, c, llm);
  ASSERT_EQ(subsets.size(), 2u);
  EXPECT_EQ(subsets[0], (ToolSubset{"a", "c"}));
  EXPECT_EQ(subsets[1], (ToolSubset{"b"}));
  EXPECT_NE(llm.call_log().front().prompt.find("Propose 2 combinations"), std::string::npos);
}

TEST(SubsetSelection, TransportFailureIsSynthesisError) {
  FailingBackend llm;
  SynthesisConfig c;
  c.max_subset_size = 1;
  EXPECT_THROW(select_tool_subsets(simple_toolkit({"a"}), c, llm), SynthesisError);
}

TEST(ScenarioBlocks, ParsesLabeledBlocks) {
  auto blocks = parse_scenario_blocks(
      "Scenario 1\nBACKGROUND: Ann is in Oslo.\nGOAL: Check the weather.\n\nNotes here.\n"
      "**Background:** Bob has 5 EUR.\n**Goal:** Convert it.\n"
      "BACKGROUND: dangling without goal\n");
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].first, "Ann is in Oslo.");
  EXPECT_EQ(blocks[0].second, "Check the weather.");
  EXPECT_EQ(blocks[1].first, "Bob has 5 EUR.");
  EXPECT_EQ(blocks[1].second, "Convert it.");
}

TEST(ScenarioPrompt, ListsOnlySubsetTools) {
  Toolkit tk = simple_toolkit({"a", "b", "c"});
  auto prompt = render_scenario_prompt({"a", "c"}, 3, tk);
  EXPECT_NE(prompt.find("- a: Tool a."), std::string::npos);
  EXPECT_NE(prompt.find("- c: Tool c."), std::string::npos);
  EXPECT_EQ(prompt.find("- b: Tool b."), std::string::npos);
  EXPECT_NE(prompt.find("Write 3 distinct scenarios"), std::string::npos);
}

TEST(SynthesizeScenarios, LabelsGoldToolsAndCapsAtK) {
  Toolkit tk = simple_toolkit({"a", "b"});
  ScriptedBackend llm;
  llm.otherwise("BACKGROUND: one\nGOAL: g1\nBACKGROUND: two\nGOAL: g2\nBACKGROUND: three\nGOAL: g3\n");
  auto out = synthesize_scenarios({"a", "b"}, 2, tk, llm, 0.7, "p");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1].scenario_id, "p-2");
  EXPECT_EQ(out[0].gold_tools, (std::set<std::string>{"a", "b"}));
  EXPECT_EQ(out[0].origin_subset, out[0].gold_tools);
  EXPECT_THROW(synthesize_scenarios({"a"}, 4, tk, llm), ArgumentError);
  EXPECT_THROW(synthesize_scenarios({"zz"}, 2, tk, llm), ArgumentError);
}

TEST(RunSynthesis, CapsAtTargetAndRenumbers) {
  Toolkit tk = synworld::testing::fixture_env().toolkit;
  SimulatedLlm llm;
  SynthesisConfig c;
  c.target_scenario_count = 6;
  c.max_subset_size = 3;
  auto outcome = run_synthesis(tk, c, llm);
  EXPECT_LE(outcome.scenarios.size(), 6u);
  EXPECT_EQ(outcome.report.accepted, outcome.scenarios.size());
  EXPECT_EQ(outcome.report.generated, outcome.report.accepted + outcome.report.rejected.size());
  for (std::size_t i = 0; i < outcome.scenarios.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "scn-%04zu", i + 1);
    EXPECT_EQ(outcome.scenarios[i].scenario_id, id);
  }
  for (std::size_t i = 0; i < outcome.scenarios.size(); ++i)
    for (std::size_t j = i + 1; j < outcome.scenarios.size(); ++j)
      EXPECT_LE(similarity(outcome.scenarios[i], outcome.scenarios[j]), 0.6);
}

TEST(RunSynthesis, SameSeedSameStore) {
  Toolkit tk = synworld::testing::fixture_env().toolkit;
  SimulatedLlm llm;
  SynthesisConfig c;
  c.target_scenario_count = 30;
  c.seed = 5;
  auto a = run_synthesis(tk, c, llm);
  auto b = run_synthesis(tk, c, llm);
  EXPECT_EQ(a.scenarios, b.scenarios);
}

TEST(RunSynthesis, DuplicateSubsetsAreFilteredAndReported) {
  Toolkit tk = simple_toolkit({"a", "b"});
  ScriptedBackend llm;
  llm.on(std::string(kSubsetPromptMarker), "tools: a\ntools: a\n");
  llm.otherwise(
      "BACKGROUND: Ann keeps bees on a roof in Oslo.\nGOAL: Use a to count the hives before winter.\n"
      "BACKGROUND: Raj repairs bicycles in Pune.\nGOAL: Use a to order spare chains for the shop.\n");
  SynthesisConfig c;
  c.target_scenario_count = 4;
  c.scenarios_per_subset = 2;
  c.max_subset_size = 1;
  auto outcome = run_synthesis(tk, c, llm);
  EXPECT_EQ(outcome.scenarios.size(), 2u);
  ASSERT_EQ(outcome.report.rejected.size(), 2u);
  EXPECT_EQ(outcome.report.rejected[0].closest_id, "scn-0001");
  EXPECT_DOUBLE_EQ(outcome.report.rejected[0].max_similarity, 1.0);
}
