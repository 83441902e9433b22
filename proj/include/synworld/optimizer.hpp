#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "synworld/llm.hpp"
#include "synworld/search_tree.hpp"
#include "synworld/types.hpp"

namespace synworld {

/// Prompt templates with named slots. The tool-description template uses
/// {example}, {tool_name}, {original_description} and {trajectory}; the
/// workflow template uses {example}, {workflow} and {trajectory}.
struct PromptTemplates {
  std::string tool_description;
  std::string tool_example;
  std::string workflow;
  std::string workflow_example;

  static PromptTemplates defaults();

  /// Reads tool_description.txt, tool_example.txt, workflow.txt and
  /// workflow_example.txt from `dir`; missing files keep the defaults.
  static PromptTemplates load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;
};

/// Replaces every {slot}; throws ConfigError when the template names a slot
/// with no value.
std::string fill_template(std::string_view text, const std::map<std::string, std::string>& slots);

/// One (before, after, modification) triple per scored edge from the root
/// down to `node_id`; edges into unscored nodes are skipped.
std::vector<OptimizationExperience> collect_experience_path(const SearchTree& tree, NodeId node_id);

/// "before=<s>, after=<s>, change=<m>" per line.
std::string format_experiences(const std::vector<OptimizationExperience>& experiences);

std::string render_tool_prompt(const ToolSpec& tool, const std::string& current_description,
                               const std::vector<Trajectory>& trajectories,
                               const PromptTemplates& templates = PromptTemplates::defaults());

/// Convenience overload using the tool's published description.
std::string render_tool_prompt(const ToolSpec& tool, const std::vector<Trajectory>& trajectories,
                               const PromptTemplates& templates = PromptTemplates::defaults());

std::string render_workflow_prompt(const std::string& workflow,
                                   const std::vector<Trajectory>& trajectories,
                                   const PromptTemplates& templates = PromptTemplates::defaults());

struct OptimizeInput {
  ActionKnowledge knowledge;
  std::vector<OptimizationExperience> experiences;
  std::vector<Trajectory> trajectories;
  /// Modifications of siblings already expanded from the same node.
  std::vector<std::string> sibling_modifications;
};

struct OptimizeResult {
  ActionKnowledge knowledge;
  std::string modification;
  std::vector<std::string> warnings;
};

struct OptimizeOptions {
  OptimizeMode mode = OptimizeMode::Both;
  PromptTemplates templates = PromptTemplates::defaults();
  double temperature = 0.7;
};

/// LLM-driven rewrite of action knowledge.
///
/// Descriptions are rewritten only for tools that appear in the supplied
/// trajectories, one tool-description prompt per tool in toolkit order. The
/// workflow is rewritten with one workflow prompt; an answer over the
/// 250-word cap is retried once and then truncated with a warning. Every
/// prompt is prefixed with the experience path and the sibling revisions.
/// Throws ArgumentError when `input.knowledge` does not validate or no
/// trajectories are given, OptimizerError on transport failure.
OptimizeResult optimize(const OptimizeInput& input, const Toolkit& toolkit, ChatBackend& llm,
                        const OptimizeOptions& options = {});

/// Expansion operator used by the search.
class KnowledgeOptimizer {
 public:
  virtual ~KnowledgeOptimizer() = default;
  virtual OptimizeResult propose(const OptimizeInput& input) = 0;
};

class LlmKnowledgeOptimizer final : public KnowledgeOptimizer {
 public:
  LlmKnowledgeOptimizer(const Toolkit& toolkit, ChatBackend& llm, OptimizeOptions options = {})
      : toolkit_(toolkit), llm_(llm), options_(std::move(options)) {}

  OptimizeResult propose(const OptimizeInput& input) override {
    return optimize(input, toolkit_, llm_, options_);
  }

 private:
  const Toolkit& toolkit_;
  ChatBackend& llm_;
  OptimizeOptions options_;
};

}  // namespace synworld
