#pragma once

#include <string>
#include <string_view>

#include "synworld/llm.hpp"

namespace synworld {

/// Phrase the simulated agent looks for in the workflow before it calls more
/// than one tool per task.
inline constexpr std::string_view kMultiToolPhrase = "every relevant tool";

/// Workflow the simulated rewriter proposes once it has seen trajectories.
std::string repaired_workflow_text();

struct SimulatedLlmOptions {
  /// When false, tool-description prompts echo the current description.
  bool repair_descriptions = true;
  /// When false, workflow prompts echo the current workflow.
  bool repair_workflow = true;
};

/// Deterministic stand-in for every LLM role of the pipeline, dispatched on
/// prompt content:
///
/// - agent prompts: a rule-based tool user. A tool is relevant when the first
///   `_`-separated token of its id occurs as a word in the goal. Unless the
///   workflow contains kMultiToolPhrase only the first relevant tool is
///   called. Required parameters take `name: value` / `name=value` values from
///   the scenario text, and every "Always pass key=value." sentence in a tool
///   description adds that argument. Each tool is attempted once, then FINISH.
/// - tool-description prompts: appends "Always pass key=value." for every
///   "Hint: requires key=value" observed after a call to that tool.
/// - workflow prompts: returns repaired_workflow_text() unless the existing
///   workflow already contains kMultiToolPhrase.
/// - subset and scenario prompts: seeded (by prompt hash) proposals and
///   BACKGROUND/GOAL blocks that mention every tool keyword of the subset.
///
/// Unrecognised prompts raise ConfigError.
class SimulatedLlm final : public ChatBackend {
 public:
  explicit SimulatedLlm(SimulatedLlmOptions options = {}) : options_(options) {}
  std::string complete(const ChatRequest& request) override;

  std::string agent_step(const std::string& prompt) const;
  std::string rewrite_description(const std::string& prompt) const;
  std::string rewrite_workflow(const std::string& prompt) const;
  std::string propose_subsets(const std::string& prompt) const;
  std::string write_scenarios(const std::string& prompt) const;

 private:
  SimulatedLlmOptions options_;
};

}  // namespace synworld
