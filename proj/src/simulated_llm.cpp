#include "synworld/simulated_llm.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <set>
#include <sstream>
#include <vector>

#include "synworld/agent.hpp"
#include "synworld/error.hpp"
#include "synworld/random.hpp"
#include "synworld/synthesis.hpp"

namespace synworld {

namespace {

struct ToolView {
  std::string id;
  std::string description;
  struct Param {
    std::string name;
    std::string type;
    std::vector<std::string> enum_values;
    bool required = false;
  };
  std::vector<Param> params;
};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::set<std::string> word_set(const std::string& text) {
  std::set<std::string> words;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      words.insert(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) words.insert(cur);
  return words;
}

std::string keyword_of(const std::string& tool_id) { return lower(tool_id.substr(0, tool_id.find('_'))); }

std::string between(const std::string& text, const std::string& open, const std::string& close,
                    bool last_open = false) {
  auto b = last_open ? text.rfind(open) : text.find(open);
  if (b == std::string::npos) return {};
  b += open.size();
  auto e = close.empty() ? std::string::npos : text.find(close, b);
  return text.substr(b, e == std::string::npos ? std::string::npos : e - b);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<ToolView> parse_tools(const std::string& section) {
  static const std::regex param_re(R"(^- (\w+) \((\w+)(?:\[([^\]]*)\])?, (required|optional)\):.*$)");
  std::vector<ToolView> tools;
  bool in_params = false;
  for (const auto& line : lines_of(section)) {
    if (line.rfind("### ", 0) == 0) {
      tools.push_back({line.substr(4), {}, {}});
      in_params = false;
      continue;
    }
    if (tools.empty()) continue;
    if (line == "Parameters:") {
      in_params = true;
      continue;
    }
    std::smatch m;
    if (in_params && std::regex_match(line, m, param_re)) {
      ToolView::Param p{m[1], m[2], {}, m[4] == "required"};
      std::istringstream values(m[3].str());
      std::string v;
      while (std::getline(values, v, '|'))
        if (!v.empty()) p.enum_values.push_back(v);
      tools.back().params.push_back(std::move(p));
    } else if (!in_params && !line.empty()) {
      auto& d = tools.back().description;
      d += (d.empty() ? "" : "\n") + line;
    }
  }
  return tools;
}

std::string value_from_text(const std::string& name, const std::string& text) {
  std::regex re("\\b" + name + R"(\s*[:=]\s*([A-Za-z0-9._-]+))", std::regex::ECMAScript | std::regex::icase);
  std::smatch m;
  if (std::regex_search(text, m, re)) {
    std::string v = m[1];
    while (!v.empty() && v.back() == '.') v.pop_back();
    if (!v.empty()) return v;
  }
  return {};
}

const std::regex& hint_re() {
  static const std::regex re(R"(Hint: requires ([A-Za-z_]\w*)=([A-Za-z0-9_-]+))");
  return re;
}

const std::regex& always_re() {
  static const std::regex re(R"(Always pass ([A-Za-z_]\w*)=([A-Za-z0-9_-]+))");
  return re;
}

constexpr std::array kNames{"Amira", "Bruno", "Chen", "Dalia", "Emeka", "Farah", "Goran", "Hana",
                            "Ines", "Jonas", "Keiko", "Luis", "Maya", "Nikolai", "Olu", "Priya",
                            "Quinn", "Rosa", "Sven", "Tariq"};
constexpr std::array kCities{"lisbon", "osaka", "nairobi", "quito", "oslo", "hanoi", "lima",
                             "porto", "seville", "krakow", "tbilisi", "dakar", "busan", "perth",
                             "bergen", "cusco", "valletta", "tallinn", "accra", "ghent"};
constexpr std::array kSituations{"organizing a reunion",    "scouting a venue",
                                 "preparing a field study", "planning a honeymoon",
                                 "arranging a client visit", "booking a chess tournament",
                                 "moving for a new job",    "writing a travel column",
                                 "attending a wedding",     "leading a school excursion",
                                 "filming a documentary",   "running a marathon"};
constexpr std::array kDays{"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
constexpr std::array kEndings{"so the itinerary can be signed off",
                              "and send a short summary to the group",
                              "before the budget meeting closes",
                              "so nothing is left to chance",
                              "and report back with the key numbers",
                              "to finalize the plan tonight",
                              "while keeping costs predictable",
                              "to settle the open questions",
                              "so the manager can approve it",
                              "and draft the announcement"};

template <class Array>
const char* pick(Rng& rng, const Array& items) {
  return items[draw_below(rng, items.size())];
}

}  // namespace

std::string repaired_workflow_text() {
  return "1. Read the goal and list every relevant tool it names. "
         "2. Call every relevant tool once, passing each required argument plus any argument its "
         "description says to always pass. "
         "3. If a call fails, keep the error hint for the tool documentation. "
         "4. When every relevant tool has answered, FINISH with an answer that summarizes the "
         "observations.";
}

std::string SimulatedLlm::complete(const ChatRequest& request) {
  validate_request(request);
  const std::string prompt = request.rendered_prompt();
  if (prompt.find(kAgentTaskMarker) != std::string::npos) return agent_step(prompt);
  if (prompt.find("improve tool interface documentation") != std::string::npos)
    return rewrite_description(prompt);
  if (prompt.find("Optimize Workflow") != std::string::npos) return rewrite_workflow(prompt);
  if (prompt.find(kSubsetPromptMarker) != std::string::npos) return propose_subsets(prompt);
  if (prompt.find(kScenarioPromptMarker) != std::string::npos) return write_scenarios(prompt);
  throw ConfigError("simulated LLM: unrecognised prompt");
}

std::string SimulatedLlm::agent_step(const std::string& prompt) const {
  const auto tools = parse_tools(between(prompt, "## Tools\n", "\n## Workflow\n"));
  const std::string workflow = between(prompt, "## Workflow\n", "\n" + std::string(kAgentTaskMarker));
  const std::string task = between(prompt, std::string(kAgentTaskMarker) + "\n", "\n## Transcript\n");
  const std::string goal = between(task, "Goal: ", "\n");
  const std::string transcript = between(prompt, "## Transcript\n", "");

  std::set<std::string> attempted;
  for (const auto& line : lines_of(transcript))
    if (line.rfind("Action: ", 0) == 0) attempted.insert(line.substr(8));

  const auto goal_words = word_set(goal);
  std::vector<const ToolView*> plan;
  for (const auto& t : tools)
    if (goal_words.contains(keyword_of(t.id))) plan.push_back(&t);
  if (lower(workflow).find(kMultiToolPhrase) == std::string::npos && plan.size() > 1) plan.resize(1);

  const ToolView* next = nullptr;
  for (const ToolView* t : plan) {
    if (!attempted.contains(t->id)) {
      next = t;
      break;
    }
  }
  if (next == nullptr) {
    std::string used;
    for (const ToolView* t : plan) used += (used.empty() ? "" : ", ") + t->id;
    return "Thought: I have gathered what the goal needs.\nAction: FINISH\nAnswer: " +
           (used.empty() ? std::string("No listed tool applies to this goal.")
                         : "Completed the task using " + used + ".") + "\n";
  }

  std::map<std::string, std::string> args;
  for (const auto& p : next->params) {
    if (!p.required) continue;
    std::string value = value_from_text(p.name, task);
    if (value.empty()) {
      if (p.type == "number") value = "1";
      else if (p.type == "boolean") value = "true";
      else if (p.type == "enum" && !p.enum_values.empty()) value = p.enum_values.front();
      else value = "unknown";
    }
    args[p.name] = value;
  }
  for (auto it = std::sregex_iterator(next->description.begin(), next->description.end(), always_re());
       it != std::sregex_iterator(); ++it)
    args[(*it)[1]] = (*it)[2];

  std::string arg_text;
  for (const auto& [k, v] : args) arg_text += (arg_text.empty() ? "" : ", ") + k + "=" + v;
  return "Thought: The goal needs " + next->id + ".\nAction: " + next->id + "\nArgs: " + arg_text + "\n";
}

std::string SimulatedLlm::rewrite_description(const std::string& prompt) const {
  const std::string tool = between(prompt, "\ntool_name: ", "\n", true);
  const std::string original = between(prompt, "\noriginal_description: ", "\ntrajectory: ", true);
  const std::string trajectory =
      between(prompt, "\ntrajectory: ", "\nPlease provide your Optimize Description", true);
  if (!options_.repair_descriptions) return original;

  std::string updated = original;
  std::string current_action;
  for (const auto& line : lines_of(trajectory)) {
    if (line.rfind("Action: ", 0) == 0) {
      current_action = line.substr(8);
    } else if (line.rfind("Observation: ", 0) == 0 && current_action == tool) {
      for (auto it = std::sregex_iterator(line.begin(), line.end(), hint_re()); it != std::sregex_iterator(); ++it) {
        std::string sentence = "Always pass " + (*it)[1].str() + "=" + (*it)[2].str() + ".";
        if (updated.find(sentence) == std::string::npos) updated += " " + sentence;
      }
    }
  }
  return updated;
}

std::string SimulatedLlm::rewrite_workflow(const std::string& prompt) const {
  const std::string existing = between(prompt, "\nExisting Workflow: ", "\nTrajectory: ", true);
  if (!options_.repair_workflow) return existing;
  if (lower(existing).find(kMultiToolPhrase) != std::string::npos) return existing;
  return repaired_workflow_text();
}

std::string SimulatedLlm::propose_subsets(const std::string& prompt) const {
  static const std::regex count_re(R"(Propose (\d+) combinations)");
  static const std::regex range_re(R"(between (\d+) and (\d+) distinct tools)");
  static const std::regex tool_re(R"(^- ([A-Za-z0-9_.-]+): )");
  std::smatch m;
  std::size_t count = 1, lo = 1, hi = 1;
  if (std::regex_search(prompt, m, count_re)) count = std::stoul(m[1]);
  if (std::regex_search(prompt, m, range_re)) {
    lo = std::stoul(m[1]);
    hi = std::stoul(m[2]);
  }
  std::vector<std::string> ids;
  for (const auto& line : lines_of(prompt))
    if (std::regex_search(line, m, tool_re)) ids.push_back(m[1]);
  if (ids.empty()) return "I could not find any tools.";
  hi = std::min(hi, ids.size());
  lo = std::min(lo, hi);

  Rng rng(fnv1a(prompt));
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t size = lo + draw_below(rng, hi - lo + 1);
    std::string line;
    for (std::size_t idx : sample_indices(rng, ids.size(), size)) line += (line.empty() ? "" : ", ") + ids[idx];
    out += "tools: " + line + "\n";
  }
  return out;
}

std::string SimulatedLlm::write_scenarios(const std::string& prompt) const {
  static const std::regex k_re(R"(Write (\d+) distinct scenarios)");
  static const std::regex tool_re(R"(^- ([A-Za-z0-9_.-]+): )");
  std::smatch m;
  std::size_t k = 2;
  if (std::regex_search(prompt, m, k_re)) k = std::stoul(m[1]);

  std::vector<std::string> keywords;
  bool in_list = false;
  for (const auto& line : lines_of(prompt)) {
    if (line == kScenarioPromptMarker) {
      in_list = true;
      continue;
    }
    if (!in_list) continue;
    if (!std::regex_search(line, m, tool_re)) break;
    std::string kw = keyword_of(m[1]);
    if (std::find(keywords.begin(), keywords.end(), kw) == keywords.end()) keywords.push_back(kw);
  }

  Rng rng(fnv1a(prompt));
  std::ostringstream out;
  for (std::size_t j = 0; j < k; ++j) {
    const char* name = pick(rng, kNames);
    const char* city = pick(rng, kCities);
    const char* situation = pick(rng, kSituations);
    const char* day = pick(rng, kDays);
    const char* ending = pick(rng, kEndings);
    std::size_t amount = 100 + 50 * draw_below(rng, 40);

    std::string services;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
      if (i > 0) services += i + 1 == keywords.size() ? " and " : ", ";
      services += "the " + keywords[i] + " service";
    }
    out << "Scenario " << j + 1 << "\n";
    switch (draw_below(rng, 3)) {
      case 0:
        out << "BACKGROUND: " << name << " is " << situation << " in " << city << " (city: " << city
            << ") with a budget of amount: " << amount << ".\n";
        break;
      case 1:
        out << "BACKGROUND: Since " << day << ", " << name << " has been " << situation
            << "; the base is " << city << " (city: " << city << ") and amount: " << amount
            << " is available.\n";
        break;
      default:
        out << "BACKGROUND: " << city << " (city: " << city << ") hosts " << name << ", who is "
            << situation << " and may spend amount: " << amount << ".\n";
        break;
    }
    out << "GOAL: By " << day << ", " << name << " must consult " << services << " " << ending
        << ".\n\n";
  }
  return out.str();
}

}  // namespace synworld
