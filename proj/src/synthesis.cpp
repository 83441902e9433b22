#include "synworld/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <regex>
#include <sstream>

#include "synworld/error.hpp"
#include "synworld/random.hpp"

namespace synworld {

namespace {

std::string trim(std::string_view s, std::string_view extra = "") {
  auto is_junk = [&](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || extra.find(c) != std::string_view::npos;
  };
  std::size_t b = 0, e = s.size();
  while (b < e && is_junk(s[b])) ++b;
  while (e > b && is_junk(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string tool_listing(const Toolkit& toolkit, const ToolSubset* only) {
  std::string out;
  for (const auto& t : toolkit.tools()) {
    if (only != nullptr && !only->contains(t.tool_id)) continue;
    out += "- " + t.tool_id + ": " + t.description + "\n";
  }
  return out;
}

std::string pad_id(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scn-%04zu", n);
  return buf;
}

}  // namespace

void validate_synthesis_config(const SynthesisConfig& config, const Toolkit& toolkit) {
  if (config.scenarios_per_subset < 2 || config.scenarios_per_subset > 3)
    throw ArgumentError("scenarios_per_subset must be 2 or 3");
  if (!(config.similarity_threshold > 0.0 && config.similarity_threshold <= 1.0))
    throw ArgumentError("similarity_threshold must lie in (0, 1]");
  if (config.target_scenario_count < 1) throw ArgumentError("target_scenario_count must be >= 1");
  if (config.min_subset_size < 1) throw ArgumentError("min_subset_size must be >= 1");
  if (config.max_subset_size < config.min_subset_size)
    throw ArgumentError("max_subset_size must be >= min_subset_size");
  if (static_cast<std::size_t>(config.max_subset_size) > toolkit.size())
    throw ArgumentError("max_subset_size exceeds the toolkit size");
}

std::size_t required_subset_count(const SynthesisConfig& config) {
  auto target = static_cast<std::size_t>(config.target_scenario_count);
  auto per = static_cast<std::size_t>(config.scenarios_per_subset);
  return (target + per - 1) / per;
}

std::string render_subset_prompt(const Toolkit& toolkit, std::size_t count, int min_size,
                                 int max_size) {
  std::ostringstream out;
  out << "You design multi-step tasks for a tool-using agent.\n"
      << kSubsetPromptMarker << " that one realistic task could need together.\n"
      << "Propose " << count << " combinations. Each combination uses between " << min_size
      << " and " << max_size << " distinct tools from this list:\n"
      << tool_listing(toolkit, nullptr)
      << "Answer with one line per combination, formatted as:\n"
      << "tools: <tool_id>, <tool_id>\n";
  return out.str();
}

std::vector<ToolSubset> parse_subset_lines(std::string_view response, const Toolkit& toolkit,
                                           int min_size, int max_size) {
  static const std::regex line_re(R"(^\s*(?:[-*]\s*)?(?:\d+[.)]\s*)?tools\s*:\s*(.*)$)",
                                  std::regex::ECMAScript | std::regex::icase);
  std::vector<ToolSubset> out;
  std::istringstream in{std::string(response)};
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) continue;
    ToolSubset subset;
    bool valid = true;
    std::istringstream items(m[1].str());
    std::string item;
    std::size_t listed = 0;
    while (std::getline(items, item, ',')) {
      std::string id = trim(item, "`'\"");
      if (id.empty()) continue;
      ++listed;
      if (!toolkit.contains(id) || !subset.insert(id).second) {
        valid = false;
        break;
      }
    }
    if (!valid || listed == 0) continue;
    auto n = static_cast<int>(subset.size());
    if (n < min_size || n > max_size) continue;
    out.push_back(std::move(subset));
  }
  return out;
}

std::vector<ToolSubset> select_tool_subsets(const Toolkit& toolkit, const SynthesisConfig& config,
                                            ChatBackend& llm) {
  if (toolkit.size() == 0) throw ArgumentError("toolkit is empty");
  validate_synthesis_config(config, toolkit);
  const std::size_t needed = required_subset_count(config);

  std::string response;
  try {
    response = llm.complete(ChatRequest::single(
        render_subset_prompt(toolkit, needed, config.min_subset_size, config.max_subset_size), {},
        config.temperature));
  } catch (const TransportError& e) {
    throw SynthesisError(std::string("tool subset selection failed: ") + e.what());
  }

  auto subsets = parse_subset_lines(response, toolkit, config.min_subset_size,
                                    config.max_subset_size);
  if (subsets.size() > needed) subsets.resize(needed);

  Rng rng(config.seed);
  const auto ids = toolkit.ids();
  const auto span = static_cast<std::size_t>(config.max_subset_size - config.min_subset_size + 1);
  while (subsets.size() < needed) {
    std::size_t size = static_cast<std::size_t>(config.min_subset_size) + draw_below(rng, span);
    ToolSubset subset;
    for (std::size_t i : sample_indices(rng, ids.size(), size)) subset.insert(ids[i]);
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

std::string render_scenario_prompt(const ToolSubset& subset, int k, const Toolkit& toolkit) {
  std::ostringstream out;
  out << "You write realistic task scenarios for a tool-using agent.\n"
      << "A scenario has a BACKGROUND (context, initial conditions and constraints) and a GOAL "
         "(the objective that can only be reached by using the tools).\n\n"
      << "Example:\n"
      << "BACKGROUND: A traveler in Lisbon is planning a weekend in Porto on a fixed budget "
         "in euros.\n"
      << "GOAL: Get the weekend forecast for Porto and convert 300 EUR to USD for the deposit.\n\n"
      << kScenarioPromptMarker << "\n"
      << tool_listing(toolkit, &subset) << "\n"
      << "Write " << k << " distinct scenarios that need all of these tools together.\n"
      << "Format every scenario as:\nBACKGROUND: ...\nGOAL: ...\n";
  return out.str();
}

std::vector<std::pair<std::string, std::string>> parse_scenario_blocks(std::string_view text) {
  static const std::regex bg_re(R"(background\s*\**\s*:)", std::regex::ECMAScript | std::regex::icase);
  static const std::regex goal_re(R"(goal\s*\**\s*:)", std::regex::ECMAScript | std::regex::icase);
  const std::string body(text);

  std::vector<std::pair<std::size_t, std::size_t>> markers;  // (start, end of marker)
  for (auto it = std::sregex_iterator(body.begin(), body.end(), bg_re); it != std::sregex_iterator();
       ++it)
    markers.emplace_back(static_cast<std::size_t>(it->position()),
                         static_cast<std::size_t>(it->position() + it->length()));

  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    std::size_t end = i + 1 < markers.size() ? markers[i + 1].first : body.size();
    std::string block = body.substr(markers[i].second, end - markers[i].second);
    std::smatch gm;
    if (!std::regex_search(block, gm, goal_re)) continue;
    std::string background = trim(std::string_view(block).substr(0, static_cast<std::size_t>(gm.position())), "*#");
    std::string goal_text = block.substr(static_cast<std::size_t>(gm.position() + gm.length()));
    // The goal ends at the first blank line; anything after it is prose.
    if (auto blank = goal_text.find("\n\n"); blank != std::string::npos) goal_text.resize(blank);
    std::string goal = trim(goal_text, "*#");
    if (background.empty() || goal.empty()) continue;
    out.emplace_back(std::move(background), std::move(goal));
  }
  return out;
}

std::vector<Scenario> synthesize_scenarios(const ToolSubset& subset, int k, const Toolkit& toolkit,
                                           ChatBackend& llm, double temperature,
                                           const std::string& id_prefix) {
  if (k < 2 || k > 3) throw ArgumentError("k must be 2 or 3");
  if (subset.empty()) throw ArgumentError("tool subset is empty");
  for (const auto& id : subset)
    if (!toolkit.contains(id)) throw ArgumentError("subset names unknown tool '" + id + "'");

  std::string response;
  try {
    response = llm.complete(
        ChatRequest::single(render_scenario_prompt(subset, k, toolkit), {}, temperature));
  } catch (const TransportError& e) {
    throw SynthesisError(std::string("scenario generation failed: ") + e.what());
  }

  std::vector<Scenario> out;
  for (auto& [background, goal] : parse_scenario_blocks(response)) {
    if (out.size() == static_cast<std::size_t>(k)) break;
    Scenario s;
    s.scenario_id = id_prefix + "-" + std::to_string(out.size() + 1);
    s.background = std::move(background);
    s.goal = std::move(goal);
    s.gold_tools = subset;
    s.origin_subset = subset;
    out.push_back(std::move(s));
  }
  return out;
}

SynthesisOutcome run_synthesis(const Toolkit& toolkit, const SynthesisConfig& config,
                               ChatBackend& llm, const SimilarityMetric& metric) {
  SynthesisOutcome outcome;
  const auto subsets = select_tool_subsets(toolkit, config, llm);
  outcome.report.subsets = subsets.size();
  const auto target = static_cast<std::size_t>(config.target_scenario_count);

  for (std::size_t i = 0; i < subsets.size() && outcome.scenarios.size() < target; ++i) {
    auto candidates = synthesize_scenarios(subsets[i], config.scenarios_per_subset, toolkit, llm,
                                           config.temperature,
                                           "subset" + std::to_string(i + 1));
    outcome.report.generated += candidates.size();
    auto filtered = dedup_filter(candidates, outcome.scenarios, config.similarity_threshold, metric);
    std::map<std::string, std::string> renamed;
    for (auto& s : filtered.accepted) {
      if (outcome.scenarios.size() == target) break;
      std::string id = pad_id(outcome.scenarios.size() + 1);
      renamed[s.scenario_id] = id;
      s.scenario_id = id;
      outcome.scenarios.push_back(std::move(s));
    }
    // Rejections may point at a candidate accepted earlier in this batch.
    for (auto& r : filtered.rejected) {
      if (auto it = renamed.find(r.closest_id); it != renamed.end()) r.closest_id = it->second;
      outcome.report.rejected.push_back(std::move(r));
    }
  }
  outcome.report.accepted = outcome.scenarios.size();
  return outcome;
}

}  // namespace synworld
