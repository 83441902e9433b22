#pragma once

#include <filesystem>
#include <string>

#include "synworld/json_io.hpp"
#include "synworld/search_tree.hpp"

namespace synworld {

inline constexpr int kCheckpointSchemaVersion = 1;

/// Everything needed to resume a search: config, node table, iteration
/// counter, history and random-engine state.
struct Checkpoint {
  SearchConfig config;
  SearchTree tree;
  std::string rng_state;
  /// Size of the scenario store the search ran on.
  std::size_t scenario_count = 0;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Json to_json(const SearchConfig& config);
SearchConfig search_config_from_json(const Json& j, std::string_view where = "config");

Json to_json(const SearchTree& tree);
SearchTree search_tree_from_json(const Json& j, std::string_view where = "tree");

Json to_json(const Checkpoint& checkpoint);
/// Throws FormatError naming the offending field, including for an unknown
/// schema_version.
Checkpoint checkpoint_from_json(const Json& j);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace synworld
