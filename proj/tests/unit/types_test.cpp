#include <gtest/gtest.h>

#include "synworld/error.hpp"
#include "synworld/types.hpp"
#include "test_support.hpp"

using namespace synworld;
using synworld::testing::simple_tool;
using synworld::testing::simple_toolkit;

TEST(Toolkit, RejectsEmptyAndDuplicateIds) {
  EXPECT_THROW(Toolkit({}), FormatError);
  EXPECT_THROW(Toolkit({simple_tool("a"), simple_tool("a")}), FormatError);
}

TEST(Toolkit, RejectsRepeatedParameterAndMissingDescription) {
  ToolSpec t = simple_tool("a");
  t.parameters.push_back(t.parameters.front());
  EXPECT_THROW(Toolkit({t}), FormatError);
  EXPECT_THROW(Toolkit({simple_tool("b", "")}), FormatError);
}

TEST(Toolkit, LookupKeepsOrder) {
  Toolkit tk = simple_toolkit({"zeta", "alpha", "mid"});
  EXPECT_EQ(tk.ids(), (std::vector<std::string>{"zeta", "alpha", "mid"}));
  ASSERT_NE(tk.find("alpha"), nullptr);
  EXPECT_EQ(tk.find("alpha")->description, "Tool alpha.");
  EXPECT_FALSE(tk.contains("nope"));
  EXPECT_NE(tk.find("mid")->find_parameter("q"), nullptr);
  EXPECT_EQ(tk.find("mid")->find_parameter("x"), nullptr);
}

TEST(ParamType, RoundTripsTags) {
  for (auto t : {ParamType::String, ParamType::Number, ParamType::Boolean, ParamType::Enum})
    EXPECT_EQ(parse_param_type(to_string(t)), t);
  EXPECT_FALSE(parse_param_type("float"));
}

TEST(Words, CountAndTruncate) {
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("  one\ttwo \n three  "), 3u);
  EXPECT_EQ(truncate_words("a  b\nc d", 3), "a b c");
  EXPECT_EQ(truncate_words("a b", 5), "a b");
}

TEST(ActionKnowledge, FromToolkitCopiesDescriptions) {
  Toolkit tk = simple_toolkit({"x", "y"});
  auto ak = ActionKnowledge::from_toolkit(tk, "plan");
  EXPECT_EQ(ak.version, 0);
  EXPECT_EQ(ak.workflow, "plan");
  EXPECT_EQ(ak.descriptions.at("y"), "Tool y.");
  EXPECT_TRUE(validate_action_knowledge(ak, tk).ok());
}

TEST(ActionKnowledge, ValidationListsEveryViolation) {
  Toolkit tk = simple_toolkit({"x", "y"});
  ActionKnowledge ak;
  ak.descriptions = {{"x", "ok"}, {"ghost", "boo"}};
  std::string long_workflow;
  for (std::size_t i = 0; i < kWorkflowWordCap + 1; ++i) long_workflow += "w ";
  ak.workflow = long_workflow;
  auto v = validate_action_knowledge(ak, tk);
  EXPECT_FALSE(v.ok());
  EXPECT_EQ(v.violations.size(), 3u);

  ak.descriptions = {{"x", "ok"}, {"y", "ok"}};
  ak.workflow = truncate_words(long_workflow, kWorkflowWordCap);
  EXPECT_TRUE(validate_action_knowledge(ak, tk).ok());
}

TEST(Scenario, CheckedAgainstToolkit) {
  Toolkit tk = simple_toolkit({"t"});
  auto s = synworld::testing::scenario("s", "bg", "goal");
  EXPECT_NO_THROW(check_scenario(s, tk));
  s.gold_tools = {"missing"};
  EXPECT_THROW(check_scenario(s, tk), ArgumentError);
  s.gold_tools = {};
  EXPECT_THROW(check_scenario(s, tk), ArgumentError);
  s = synworld::testing::scenario("s", "", "goal");
  EXPECT_THROW(check_scenario(s, tk), ArgumentError);
}

TEST(Trajectory, FinishedOnlyWhenLastStepIsFinish) {
  Trajectory t;
  EXPECT_FALSE(t.finished());
  t.steps.push_back({"", "a", {}, "obs", true});
  EXPECT_FALSE(t.finished());
  t.steps.push_back({"", std::string(kFinish), {}, "", true});
  EXPECT_TRUE(t.finished());
}
