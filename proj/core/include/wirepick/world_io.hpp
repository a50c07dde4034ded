#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wirepick/config.hpp"
#include "wirepick/simulator.hpp"

namespace wirepick::sim {

inline constexpr int kSnapshotVersion = 1;
inline constexpr int kScenarioVersion = 1;

// Versioned JSON document: config, bodies, graph, RNG cursor, pending forced outcomes.
std::string snapshot_to_json(const BinState& world);
// Throws FormatError on malformed documents or version mismatch.
BinState snapshot_from_json(std::string_view text);
void save_snapshot(const std::string& path, const BinState& world);
BinState load_snapshot(const std::string& path);

// World keys (without the "sim." prefix used in controller config files).
// Unknown keys and broken invariants throw ConfigError.
WorldConfig world_config_from_raw(const RawConfig& raw, WorldConfig base = {});
std::string serialize_world_config(const WorldConfig& config);
std::vector<std::string> world_config_keys();

// Scripted run: a world, optional edits, a fixed first grasp and a queue of
// forced outcomes, then `attempts` controller attempts.
struct Scenario {
  std::string name;
  WorldConfig world;
  std::vector<Edge> extra_edges;
  std::optional<std::pair<int, double>> grasp;  // body id, arc parameter
  std::vector<std::pair<std::string, double>> forced;
  RawConfig controller;      // controller key overrides
  std::string policy = "OursG";
  int attempts = 1;
};

// JSON:
// {"version":1, "name":"...", "world":{key:value,...}, "edges":[[a,b,w],...],
//  "grasp":{"id":0,"s":0.5}, "forced":[["lift_spike",1],...],
//  "controller":{key:value,...}, "policy":"OursG", "attempts":1}
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

// Builds the initial world of a scenario (init_world plus edits and forced queue).
BinState scenario_world(const Scenario& scenario);

}  // namespace wirepick::sim
