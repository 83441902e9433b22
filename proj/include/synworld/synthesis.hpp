#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synworld/llm.hpp"
#include "synworld/similarity.hpp"
#include "synworld/types.hpp"

namespace synworld {

struct SynthesisConfig {
  int scenarios_per_subset = 3;
  double similarity_threshold = 0.6;
  int target_scenario_count = 200;
  int min_subset_size = 1;
  int max_subset_size = 4;
  std::uint64_t seed = 0;
  double temperature = 0.7;
};

/// Throws ArgumentError when the config is inconsistent with the toolkit.
void validate_synthesis_config(const SynthesisConfig& config, const Toolkit& toolkit);

/// ceil(target / scenarios_per_subset).
std::size_t required_subset_count(const SynthesisConfig& config);

using ToolSubset = std::set<std::string>;

/// Marker line present in every subset-selection prompt.
inline constexpr std::string_view kSubsetPromptMarker = "Propose tool combinations";
/// Marker line present in every scenario-writing prompt.
inline constexpr std::string_view kScenarioPromptMarker = "Tools for this task:";

std::string render_subset_prompt(const Toolkit& toolkit, std::size_t count, int min_size,
                                 int max_size);

/// Parses "tools: a, b" lines. Lines naming unknown tools, repeating a tool or
/// falling outside [min_size, max_size] are skipped.
std::vector<ToolSubset> parse_subset_lines(std::string_view response, const Toolkit& toolkit,
                                           int min_size, int max_size);

/// Asks the LLM for tool combinations; any shortfall (including a wholly
/// unparseable answer) is filled by seeded uniform sampling without
/// replacement. Transport failures become SynthesisError.
std::vector<ToolSubset> select_tool_subsets(const Toolkit& toolkit, const SynthesisConfig& config,
                                            ChatBackend& llm);

std::string render_scenario_prompt(const ToolSubset& subset, int k, const Toolkit& toolkit);

/// (background, goal) pairs from labeled BACKGROUND:/GOAL: blocks; blocks
/// lacking either part are dropped.
std::vector<std::pair<std::string, std::string>> parse_scenario_blocks(std::string_view text);

/// Up to k candidates with gold_tools = origin_subset = subset and ids
/// "<id_prefix>-<j>".
std::vector<Scenario> synthesize_scenarios(const ToolSubset& subset, int k, const Toolkit& toolkit,
                                           ChatBackend& llm, double temperature = 0.7,
                                           const std::string& id_prefix = "cand");

struct SynthesisReport {
  std::size_t subsets = 0;
  std::size_t generated = 0;
  std::size_t accepted = 0;
  std::vector<Rejection> rejected;
};

struct SynthesisOutcome {
  std::vector<Scenario> scenarios;
  SynthesisReport report;
};

/// Full pipeline: subsets, per-subset generation, online dedup against all
/// accepted scenarios. Stops at target_scenario_count; accepted scenarios are
/// renumbered "scn-0001", "scn-0002", ...
SynthesisOutcome run_synthesis(const Toolkit& toolkit, const SynthesisConfig& config,
                               ChatBackend& llm,
                               const SimilarityMetric& metric = ShingleJaccard{});

}  // namespace synworld
