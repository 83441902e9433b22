#include <gtest/gtest.h>

#include "synworld/agent.hpp"
#include "synworld/error.hpp"
#include "synworld/simulated_llm.hpp"
#include "synworld/transcript.hpp"
#include "test_support.hpp"

using namespace synworld;
using namespace synworld::testing;

TEST(ParseAction, ToolCallWithKeyValueArgs) {
  auto a = parse_agent_action("Thought: need weather\nAction: weather_lookup\nArgs: city=oslo, units=\"metric\"\n");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->thought, "need weather");
  EXPECT_EQ(a->tool_id, "weather_lookup");
  EXPECT_EQ(a->arguments, (Arguments{{"city", "oslo"}, {"units", "metric"}}));
}

TEST(ParseAction, JsonArgsAndDecorations) {
  auto a = parse_agent_action("**Action:** `currency_convert`\n**Args:** {\"amount\": 5, \"from\": \"EUR\", \"to\": \"USD\"}");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->tool_id, "currency_convert");
  EXPECT_EQ(a->arguments.at("amount"), "5");
  EXPECT_EQ(a->arguments.at("from"), "EUR");
}

TEST(ParseAction, FinishWithAnswer) {
  auto a = parse_agent_action("Thought: done\nAction: finish\nAnswer: It is sunny.\nMore detail.");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->tool_id, kFinish);
  EXPECT_EQ(a->answer, "It is sunny.\nMore detail.");
}

TEST(ParseAction, Unparseable) {
  EXPECT_FALSE(parse_agent_action("I think I should call a tool."));
  EXPECT_FALSE(parse_agent_action("Action: x\nArgs: not-a-pair"));
  EXPECT_FALSE(parse_agent_action("Action: x\nArgs: {broken"));
}

TEST(ParseAction, FirstActionOnly) {
  auto a = parse_agent_action("Action: a\nArgs: q=1\nAction: b\nArgs: q=2");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->tool_id, "a");
  EXPECT_EQ(a->arguments.at("q"), "1");
}

TEST(AgentPrompt, ShowsKnowledgeNotToolkitDescriptions) {
  auto env = fixture_env();
  auto ak = fixture_knowledge();
  ak.descriptions["web_search"] = "REWRITTEN";
  ak.workflow = "my workflow";
  auto prompt = render_agent_prompt(ak, env.toolkit, fixture_scenarios()[0], {});
  EXPECT_NE(prompt.find("### web_search\nREWRITTEN\n"), std::string::npos);
  EXPECT_NE(prompt.find("## Workflow\nmy workflow\n"), std::string::npos);
  EXPECT_NE(prompt.find("- units (enum[metric|imperial], optional): Unit system."), std::string::npos);
  EXPECT_NE(prompt.find("(no steps yet)"), std::string::npos);
}

TEST(Transcript, StepFormatting) {
  TrajectoryStep s{"t", "w", {{"b", "2"}, {"a", "1"}}, std::string(600, 'x'), true};
  auto text = format_step(s, "");
  EXPECT_NE(text.find("Args: a=1, b=2\n"), std::string::npos);
  EXPECT_NE(text.find("Observation: " + std::string(500, 'x') + "...\n"), std::string::npos);
  TrajectoryStep fin{"ok", std::string(kFinish), {}, "", true};
  EXPECT_EQ(format_step(fin, "ans"), "Thought: ok\nAction: FINISH\nAnswer: ans\n");
}

TEST(Episode, SimulatedAgentUsesHintsOnlyWhenDocumented) {
  SimEnv env(fixture_env());
  SimulatedLlm llm;
  auto ak = fixture_knowledge();
  auto scenarios = fixture_scenarios();
  const Scenario& weather = scenarios[0];

  auto fail = run_episode(ak, weather, env, llm);
  EXPECT_EQ(fail.score, 0.0);
  ASSERT_EQ(fail.steps.size(), 2u);
  EXPECT_EQ(fail.steps[0].arguments, (Arguments{{"city", "lisbon"}}));
  EXPECT_NE(fail.steps[0].observation.find("Hint: requires units=metric"), std::string::npos);
  EXPECT_TRUE(fail.finished());

  ak.descriptions["weather_lookup"] += " Always pass units=metric.";
  auto pass = run_episode(ak, weather, env, llm);
  EXPECT_EQ(pass.score, 1.0);
  EXPECT_FALSE(pass.final_answer.empty());
}

TEST(Episode, StepLimitAndUnparseableReplies) {
  SimEnv env(fixture_env());
  ScriptedBackend llm;
  llm.otherwise("no idea");
  EpisodeOptions options;
  options.max_steps = 3;
  auto t = run_episode(fixture_knowledge(), fixture_scenarios()[0], env, llm, options);
  ASSERT_EQ(t.steps.size(), 3u);
  EXPECT_EQ(t.steps[0].tool_id, "");
  EXPECT_EQ(t.steps[0].observation, "unparseable action");
  EXPECT_EQ(t.score, 0.0);
  options.max_steps = 0;
  EXPECT_THROW(run_episode(fixture_knowledge(), fixture_scenarios()[0], env, llm, options), ArgumentError);
}

TEST(Evaluate, FixtureBaselineIsTwoOfTwelve) {
  SimEnv env(fixture_env());
  SimulatedLlm llm;
  auto result = evaluate(fixture_knowledge(), fixture_scenarios(), env, llm);
  EXPECT_EQ(result.trajectories.size(), 12u);
  EXPECT_EQ(result.passed, 2u);
  EXPECT_DOUBLE_EQ(result.pass_rate, 2.0 / 12.0);
}

TEST(Evaluate, WorkersGiveSameResult) {
  SimEnv env(fixture_env());
  SimulatedLlm llm;
  EvaluateOptions options;
  options.workers = 4;
  auto serial = evaluate(fixture_knowledge(), fixture_scenarios(), env, llm);
  auto parallel = evaluate(fixture_knowledge(), fixture_scenarios(), env, llm, options);
  EXPECT_EQ(serial.trajectories, parallel.trajectories);
}

TEST(Evaluate, TransportFailureMarksEpisode) {
  SimEnv env(fixture_env());
  CallbackBackend llm([](const ChatRequest&) -> std::string { throw TransportError("offline"); });
  auto result = evaluate(fixture_knowledge(), fixture_scenarios(), env, llm);
  EXPECT_EQ(result.errors, 12u);
  EXPECT_EQ(result.pass_rate, 0.0);
  EXPECT_EQ(*result.trajectories[0].error, "offline");
  EXPECT_THROW(evaluate(fixture_knowledge(), {}, env, llm), ArgumentError);
}

TEST(Score, RejectsForeignTrajectory) {
  SimEnv env(fixture_env());
  Trajectory t;
  t.scenario_id = "other";
  EXPECT_THROW(score_trajectory(fixture_scenarios()[0], t, env), ArgumentError);
}
