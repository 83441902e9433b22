#include "synworld/agent.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <sstream>

#include "synworld/error.hpp"
#include "synworld/json_io.hpp"
#include "synworld/transcript.hpp"

namespace synworld {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

enum class Field { None, Thought, Action, Args, Answer };

// Leading "**", "-" or whitespace is tolerated before a keyword.
Field keyword_field(const std::string& line, std::string& rest) {
  std::size_t i = 0;
  while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == '*' || line[i] == '-'))
    ++i;
  auto colon = line.find(':', i);
  if (colon == std::string::npos) return Field::None;
  std::string key = lower(trim(std::string_view(line).substr(i, colon - i)));
  while (!key.empty() && key.back() == '*') key.pop_back();
  Field f = Field::None;
  if (key == "thought") f = Field::Thought;
  else if (key == "action") f = Field::Action;
  else if (key == "args" || key == "arguments" || key == "action input") f = Field::Args;
  else if (key == "answer" || key == "final answer") f = Field::Answer;
  if (f != Field::None) {
    rest = line.substr(colon + 1);
    while (!rest.empty() && rest.front() == '*') rest.erase(rest.begin());
  }
  return f;
}

std::optional<Arguments> parse_arguments(const std::string& text) {
  Arguments args;
  std::string body = trim(text);
  if (body.empty() || body == "{}" || lower(body) == "none") return args;
  if (body.front() == '{') {
    try {
      Json j = Json::parse(body);
      if (!j.is_object()) return std::nullopt;
      for (auto it = j.begin(); it != j.end(); ++it) {
        const Json& v = it.value();
        args[it.key()] = v.is_string() ? v.get<std::string>() : v.dump();
      }
      return args;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  std::istringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string piece = trim(item);
    if (piece.empty()) continue;
    auto eq = piece.find('=');
    if (eq == std::string::npos || eq == 0) return std::nullopt;
    std::string value = trim(std::string_view(piece).substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    args[trim(std::string_view(piece).substr(0, eq))] = value;
  }
  return args;
}

std::string describe_parameter(const ParamSpec& p) {
  std::string type(to_string(p.type));
  if (p.type == ParamType::Enum) {
    type += "[";
    for (std::size_t i = 0; i < p.enum_values.size(); ++i) {
      if (i) type += "|";
      type += p.enum_values[i];
    }
    type += "]";
  }
  return "- " + p.name + " (" + type + ", " + (p.required ? "required" : "optional") + "): " + p.description;
}

}  // namespace

std::optional<AgentAction> parse_agent_action(std::string_view text) {
  AgentAction action;
  std::string thought, act, args, answer;
  bool saw_action = false;
  Field current = Field::None;
  std::istringstream in{std::string(text)};
  std::string line;
  auto target = [&](Field f) -> std::string* {
    switch (f) {
      case Field::Thought: return &thought;
      case Field::Action: return &act;
      case Field::Args: return &args;
      case Field::Answer: return &answer;
      case Field::None: return nullptr;
    }
    return nullptr;
  };
  while (std::getline(in, line)) {
    std::string rest;
    Field f = keyword_field(line, rest);
    if (f != Field::None) {
      // Only the first Action block counts; a model may ramble on afterwards.
      if (f == Field::Action && saw_action) break;
      if (f == Field::Action) saw_action = true;
      current = f;
      std::string* dst = target(f);
      if (!dst->empty()) *dst += "\n";
      *dst += rest;
    } else if (std::string* dst = target(current)) {
      *dst += "\n" + line;
    }
  }
  act = trim(act);
  while (!act.empty() && (act.front() == '`' || act.front() == '"')) act.erase(act.begin());
  while (!act.empty() && (act.back() == '`' || act.back() == '"' || act.back() == '.')) act.pop_back();
  if (!saw_action || act.empty()) return std::nullopt;
  action.thought = trim(thought);
  if (lower(act) == "finish") {
    action.tool_id = std::string(kFinish);
    action.answer = trim(answer);
    return action;
  }
  auto parsed = parse_arguments(args);
  if (!parsed) return std::nullopt;
  action.tool_id = act;
  action.arguments = std::move(*parsed);
  return action;
}

std::string agent_system_prompt() {
  return "You are an agent that solves tasks by calling tools.\n"
         "Reply with exactly one step in this format:\n"
         "Thought: <reasoning>\nAction: <tool_id>\nArgs: <key=value, key=value>\n"
         "When the goal is complete, reply with:\n"
         "Thought: <reasoning>\nAction: FINISH\nAnswer: <final answer>\n";
}

std::string render_agent_prompt(const ActionKnowledge& ak, const Toolkit& toolkit,
                                const Scenario& scenario, const std::vector<TrajectoryStep>& steps,
                                const std::string& final_answer) {
  std::ostringstream out;
  out << "## Tools\n";
  for (const auto& tool : toolkit.tools()) {
    auto it = ak.descriptions.find(tool.tool_id);
    out << "### " << tool.tool_id << "\n"
        << (it != ak.descriptions.end() ? it->second : tool.description) << "\n";
    if (!tool.parameters.empty()) {
      out << "Parameters:\n";
      for (const auto& p : tool.parameters) out << describe_parameter(p) << "\n";
    }
    out << "\n";
  }
  out << "## Workflow\n" << (ak.workflow.empty() ? std::string("(none)") : ak.workflow) << "\n\n";
  out << kAgentTaskMarker << "\n"
      << "Background: " << scenario.background << "\n"
      << "Goal: " << scenario.goal << "\n\n";
  out << "## Transcript\n";
  if (steps.empty()) out << "(no steps yet)\n";
  for (std::size_t i = 0; i < steps.size(); ++i)
    out << "Step " << i + 1 << "\n" << format_step(steps[i], final_answer);
  out << "\nGive your next step.\n";
  return out.str();
}

Trajectory run_episode(const ActionKnowledge& ak, const Scenario& scenario,
                       const EnvironmentInterface& env, ChatBackend& llm,
                       const EpisodeOptions& options) {
  if (options.max_steps < 1) throw ArgumentError("max_steps must be >= 1");
  if (auto v = validate_action_knowledge(ak, env.toolkit()); !v.ok())
    throw ArgumentError("invalid action knowledge: " + v.violations.front());

  Trajectory trajectory;
  trajectory.scenario_id = scenario.scenario_id;
  const std::string system = agent_system_prompt();
  while (static_cast<int>(trajectory.steps.size()) < options.max_steps) {
    ChatRequest request = ChatRequest::single(
        render_agent_prompt(ak, env.toolkit(), scenario, trajectory.steps), system,
        options.temperature);
    std::string reply = llm.complete(request);

    auto action = parse_agent_action(reply);
    if (!action) {
      trajectory.steps.push_back({"", "", {}, "unparseable action", false});
      continue;
    }
    if (action->tool_id == kFinish) {
      trajectory.steps.push_back({action->thought, std::string(kFinish), {}, "", true});
      trajectory.final_answer = action->answer;
      break;
    }
    ToolObservation obs = env.invoke_tool(action->tool_id, action->arguments, scenario);
    trajectory.steps.push_back(
        {action->thought, action->tool_id, std::move(action->arguments), std::move(obs.text), obs.ok});
  }
  trajectory.score = score_trajectory(scenario, trajectory, env);
  return trajectory;
}

double score_trajectory(const Scenario& scenario, const Trajectory& trajectory,
                        const EnvironmentInterface& env) {
  if (trajectory.scenario_id != scenario.scenario_id)
    throw ArgumentError("trajectory belongs to '" + trajectory.scenario_id + "', not '" +
                        scenario.scenario_id + "'");
  return env.check_goal(scenario, trajectory) ? 1.0 : 0.0;
}

EvaluationResult evaluate(const ActionKnowledge& ak, const std::vector<Scenario>& scenarios,
                          const EnvironmentInterface& env, ChatBackend& llm,
                          const EvaluateOptions& options) {
  if (scenarios.empty()) throw ArgumentError("evaluate needs at least one scenario");
  if (auto v = validate_action_knowledge(ak, env.toolkit()); !v.ok())
    throw ArgumentError("invalid action knowledge: " + v.violations.front());

  auto run_one = [&](const Scenario& s) {
    try {
      return run_episode(ak, s, env, llm, options.episode);
    } catch (const TransportError& e) {
      Trajectory failed;
      failed.scenario_id = s.scenario_id;
      failed.error = e.what();
      return failed;
    }
  };

  EvaluationResult result;
  result.trajectories.resize(scenarios.size());
  const auto workers = static_cast<std::size_t>(std::max(1, options.workers));
  if (workers == 1) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) result.trajectories[i] = run_one(scenarios[i]);
  } else {
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < scenarios.size(); i += workers)
          result.trajectories[i] = run_one(scenarios[i]);
      }));
    }
    for (auto& t : tasks) t.get();
  }

  for (const auto& t : result.trajectories) {
    if (t.error) ++result.errors;
    if (t.score == 1.0) ++result.passed;
  }
  result.pass_rate = static_cast<double>(result.passed) / static_cast<double>(scenarios.size());
  return result;
}

}  // namespace synworld
