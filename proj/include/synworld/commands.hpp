#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "synworld/search_tree.hpp"
#include "synworld/simulated_llm.hpp"
#include "synworld/synthesis.hpp"

namespace synworld {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitBackend = 3;

enum class EnvironmentKind { Sim, Live };
enum class BackendKind { Simulated, Http };

struct BackendSettings {
  BackendKind kind = BackendKind::Simulated;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4-turbo";
  int max_retries = 3;
  int timeout_seconds = 120;
  SimulatedLlmOptions simulated;
};

/// Settings shared by every command. Paths given in a config file are
/// resolved against the file's directory.
struct RunConfig {
  std::filesystem::path toolkit;
  std::filesystem::path scenarios;
  /// SimEnv definition; when set and `toolkit` is empty, its tools are used.
  std::filesystem::path env;
  std::filesystem::path output_dir = "out";
  std::filesystem::path prompts_dir;
  std::filesystem::path initial_knowledge;
  std::string initial_workflow;
  EnvironmentKind environment = EnvironmentKind::Sim;
  SynthesisConfig synthesis;
  SearchConfig search;
  BackendSettings backend;
  int workers = 1;
};

/// Throws FormatError naming the offending field.
RunConfig load_run_config(const std::filesystem::path& path);

/// Entry point of the `synworld` tool; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace synworld
