#include "synworld/optimizer.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "synworld/error.hpp"
#include "synworld/json_io.hpp"
#include "synworld/transcript.hpp"

namespace synworld {

namespace {

constexpr std::string_view kToolTemplate =
    "Analyze the following tool execution trajectories to improve tool interface documentation.\n"
    "For all trajectories:\n"
    "1. Identify functional mismatches between original description and actual usage patterns\n"
    "2. Detect parameter inefficiencies (missing/underutilized fields)\n"
    "3. Extract implicit requirements from error patterns\n"
    "4. Generate enhanced documentation with:\n"
    "    Clear input specifications (required vs optional)\n"
    "    Contextual usage guidelines\n"
    "    Error prevention tips\n"
    "    Response format expectations\n"
    "Here is an example.\n"
    "{example}\n"
    "Now it's your turn to analyze the following tool execution trajectories to improve tool "
    "interface documentation.\n"
    "tool_name: {tool_name}\n"
    "original_description: {original_description}\n"
    "trajectory: {trajectory}\n"
    "Please provide your Optimize Description for the tool. Just modify the description part and "
    "do not change the parameters description.\n"
    "Make Sure your description is clear and concise.\n";

// Replaceable exemplar; swap it through tool_example.txt.
constexpr std::string_view kToolExample =
    "<example>\n"
    "tool_name: stock_quote\n"
    "original_description: Returns stock prices.\n"
    "trajectory: Step 1 / Action: stock_quote / Args: symbol=apple / Observation: Error: unknown "
    "symbol, use an exchange ticker.\n"
    "Optimize Description: Returns the latest trade price of one equity. `symbol` must be an "
    "exchange ticker such as AAPL, not a company name; names fail with \"unknown symbol\". "
    "Responds with price and currency.\n"
    "</example>";

constexpr std::string_view kWorkflowTemplate =
    "Analyze the provided interaction trajectory and existing workflow steps to derive a "
    "generalized, reusable workflow for similar tool calling tasks.\n"
    "1. Analyzing error patterns (authentication gaps, deprecated endpoints) and tool "
    "dependencies from interaction histories.\n"
    "2. Extracting implicit requirements (authentication, sorting logic) and mandatory "
    "parameters from error responses.\n"
    "3. Structuring a generic workflow with authentication validation, parameter checks, state "
    "management between API calls, and error fallbacks.\n"
    "Here is an example.\n"
    "{example}\n"
    "Now it's your turn.\n"
    "Existing Workflow: {workflow}\n"
    "Trajectory: {trajectory}\n"
    "Please provide your Optimize Workflow for the task. And make sure your workflow is clear and "
    "concise and no longer than 200 words.\n";

// Replaceable exemplar; swap it through workflow_example.txt.
constexpr std::string_view kWorkflowExample =
    "<example>\n"
    "Existing Workflow: Call the booking tool and answer.\n"
    "Trajectory: Step 1 / Action: hotel_book / Args: hotel=ritz / Observation: Error: missing "
    "session token.\n"
    "Optimize Workflow: 1. Open a session first and keep its token. 2. Search before booking and "
    "pass the chosen id to the booking call. 3. On a parameter error, read the message, fix the "
    "argument and retry once. 4. Finish with an answer that cites the observations.\n"
    "</example>";

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Strips code fences and a leading "Optimize(d) Description:" style label.
std::string clean_answer(std::string_view raw, const char* label) {
  std::string text = trim(raw);
  if (text.rfind("```", 0) == 0) {
    auto first_nl = text.find('\n');
    text = first_nl == std::string::npos ? "" : text.substr(first_nl + 1);
    if (auto fence = text.rfind("```"); fence != std::string::npos) text.resize(fence);
    text = trim(text);
  }
  std::regex label_re(std::string(R"(^\**\s*(?:optimi[sz]ed?\s+)?)") + label + R"(\s*\**\s*:\s*\**)",
                      std::regex::ECMAScript | std::regex::icase);
  text = std::regex_replace(text, label_re, "", std::regex_constants::format_first_only);
  return trim(text);
}

std::string preamble(const OptimizeInput& input) {
  std::string out = "Prior edits on this branch and their score changes:\n";
  out += input.experiences.empty() ? "(none)\n" : format_experiences(input.experiences);
  if (!input.sibling_modifications.empty()) {
    out += "Revisions already tried from this same starting point; propose a different revision:\n";
    for (const auto& m : input.sibling_modifications) out += "- " + m + "\n";
  }
  return out + "\n";
}

std::string complete_or_throw(ChatBackend& llm, const std::string& prompt, double temperature) {
  try {
    return llm.complete(ChatRequest::single(prompt, {}, temperature));
  } catch (const TransportError& e) {
    throw OptimizerError(std::string("knowledge rewrite failed: ") + e.what());
  }
}

}  // namespace

PromptTemplates PromptTemplates::defaults() {
  return {std::string(kToolTemplate), std::string(kToolExample), std::string(kWorkflowTemplate),
          std::string(kWorkflowExample)};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t = defaults();
  auto maybe_read = [&](const char* name, std::string& slot) {
    auto path = dir / name;
    if (std::filesystem::exists(path)) slot = read_text_file(path);
  };
  maybe_read("tool_description.txt", t.tool_description);
  maybe_read("tool_example.txt", t.tool_example);
  maybe_read("workflow.txt", t.workflow);
  maybe_read("workflow_example.txt", t.workflow_example);
  return t;
}

void PromptTemplates::save(const std::filesystem::path& dir) const {
  write_text_file(dir / "tool_description.txt", tool_description);
  write_text_file(dir / "tool_example.txt", tool_example);
  write_text_file(dir / "workflow.txt", workflow);
  write_text_file(dir / "workflow_example.txt", workflow_example);
}

std::string fill_template(std::string_view text, const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      auto close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        std::string name(text.substr(i + 1, close - i - 1));
        bool identifier = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
        });
        if (identifier) {
          auto it = slots.find(name);
          if (it == slots.end()) throw ConfigError("template slot {" + name + "} has no value");
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

std::vector<OptimizationExperience> collect_experience_path(const SearchTree& tree, NodeId node_id) {
  auto path = tree.path_to_root(node_id);
  std::reverse(path.begin(), path.end());  // root first
  std::vector<OptimizationExperience> out;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const MctsNode& parent = tree.node(path[i - 1]);
    const MctsNode& child = tree.node(path[i]);
    if (!parent.score || !child.score) continue;
    out.push_back({*parent.score, *child.score, child.modification});
  }
  return out;
}

std::string format_experiences(const std::vector<OptimizationExperience>& experiences) {
  std::string out;
  for (const auto& e : experiences)
    out += "before=" + format_fixed(e.score_before) + ", after=" + format_fixed(e.score_after) +
           ", change=" + e.modification + "\n";
  return out;
}

std::string render_tool_prompt(const ToolSpec& tool, const std::string& current_description,
                               const std::vector<Trajectory>& trajectories,
                               const PromptTemplates& templates) {
  if (trajectories.empty()) throw ArgumentError("tool prompt needs at least one trajectory");
  return fill_template(templates.tool_description,
                       {{"example", templates.tool_example},
                        {"tool_name", tool.tool_id},
                        {"original_description", current_description},
                        {"trajectory", serialize_trajectories(trajectories)}});
}

std::string render_tool_prompt(const ToolSpec& tool, const std::vector<Trajectory>& trajectories,
                               const PromptTemplates& templates) {
  return render_tool_prompt(tool, tool.description, trajectories, templates);
}

std::string render_workflow_prompt(const std::string& workflow,
                                   const std::vector<Trajectory>& trajectories,
                                   const PromptTemplates& templates) {
  if (trajectories.empty()) throw ArgumentError("workflow prompt needs at least one trajectory");
  return fill_template(templates.workflow,
                       {{"example", templates.workflow_example},
                        {"workflow", workflow.empty() ? std::string("(none)") : workflow},
                        {"trajectory", serialize_trajectories(trajectories)}});
}

OptimizeResult optimize(const OptimizeInput& input, const Toolkit& toolkit, ChatBackend& llm,
                        const OptimizeOptions& options) {
  if (auto v = validate_action_knowledge(input.knowledge, toolkit); !v.ok())
    throw ArgumentError("invalid action knowledge: " + v.violations.front());
  if (input.trajectories.empty()) throw ArgumentError("optimize needs at least one trajectory");

  OptimizeResult result;
  result.knowledge = input.knowledge;
  result.knowledge.version = input.knowledge.version + 1;
  const std::string head = preamble(input);
  std::string desc_summary = "descriptions: not optimized";
  std::string flow_summary = "workflow: not optimized";

  if (options.mode != OptimizeMode::WorkflowOnly) {
    std::set<std::string> touched;
    for (const auto& t : input.trajectories)
      for (const auto& s : t.steps)
        if (!s.is_finish() && toolkit.contains(s.tool_id)) touched.insert(s.tool_id);

    std::vector<std::string> parts;
    for (const auto& tool : toolkit.tools()) {
      if (!touched.contains(tool.tool_id)) continue;
      std::vector<Trajectory> relevant;
      for (const auto& t : input.trajectories) {
        if (std::any_of(t.steps.begin(), t.steps.end(),
                        [&](const TrajectoryStep& s) { return s.tool_id == tool.tool_id; }))
          relevant.push_back(t);
      }
      const std::string& old_text = input.knowledge.descriptions.at(tool.tool_id);
      std::string prompt = head + render_tool_prompt(tool, old_text, relevant, options.templates);
      std::string answer = clean_answer(complete_or_throw(llm, prompt, options.temperature), "description");
      if (answer.empty()) {
        result.warnings.push_back("empty description rewrite for " + tool.tool_id + " ignored");
        answer = old_text;
      }
      parts.push_back(tool.tool_id + (answer == old_text ? " unchanged" : " changed"));
      result.knowledge.descriptions[tool.tool_id] = std::move(answer);
    }
    if (parts.empty()) {
      desc_summary = "descriptions: no tools in trajectories";
    } else {
      desc_summary = "descriptions: ";
      for (std::size_t i = 0; i < parts.size(); ++i) desc_summary += (i ? ", " : "") + parts[i];
    }
  }

  if (options.mode != OptimizeMode::DescriptionOnly) {
    const std::string& old_flow = input.knowledge.workflow;
    std::string prompt = head + render_workflow_prompt(old_flow, input.trajectories, options.templates);
    std::string answer = clean_answer(complete_or_throw(llm, prompt, options.temperature), "workflow");
    if (word_count(answer) > kWorkflowWordCap) {
      std::string retry = prompt + "\nYour previous answer had " + std::to_string(word_count(answer)) +
                          " words. Rewrite it in no more than " +
                          std::to_string(kWorkflowWordTarget) + " words.\n";
      answer = clean_answer(complete_or_throw(llm, retry, options.temperature), "workflow");
      if (word_count(answer) > kWorkflowWordCap) {
        result.warnings.push_back("workflow rewrite truncated from " +
                                  std::to_string(word_count(answer)) + " to " +
                                  std::to_string(kWorkflowWordCap) + " words");
        answer = truncate_words(answer, kWorkflowWordCap);
      }
    }
    if (answer.empty()) {
      result.warnings.push_back("empty workflow rewrite ignored");
      answer = old_flow;
    }
    flow_summary = std::string("workflow: ") + (answer == old_flow ? "unchanged" : "changed") + " (" +
                   std::to_string(word_count(old_flow)) + " -> " + std::to_string(word_count(answer)) +
                   " words)";
    result.knowledge.workflow = std::move(answer);
  }

  result.modification = desc_summary + "; " + flow_summary;
  return result;
}

}  // namespace synworld
