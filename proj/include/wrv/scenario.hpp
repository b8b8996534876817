#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrv/acoustic.hpp"
#include "wrv/dive_model.hpp"
#include "wrv/gmm.hpp"
#include "wrv/maneuver.hpp"
#include "wrv/tracker.hpp"
#include "wrv/trajectory.hpp"

namespace wrv {

struct BoatConfig {
  double x = 0.0;
  double y = 0.0;
  double heading_deg = 45.0;
  double speed_mps = 4.0;
  double array_offset_m = 100.0;
  bool enforce_speed_range = true;  // catamaran envelope is 2..6 m/s
};

struct UavConfig {
  double max_speed_mps = 10.0;
  double flight_budget_s = 900.0;
};

struct WhaleConfig {
  std::string source = "synthetic";  // "synthetic" | "csv"
  std::string path;                  // csv only
  bool tagged = true;
  SynthWhaleParams synth;
};

struct VhfSimConfig {
  bool enabled = true;
  double sigma_deg = 2.0;     // bearing noise of injected VHF AOA
  double match_gate_m = 300.0;  // max belief-to-measurement-ray distance
};

struct PlannerConfig {
  int particle_count = 100;
  double stage_cap_s = 120.0;
  double rendezvous_radius_m = 200.0;
  double horizon_s = 0.0;       // 0: two dive cycles
  double horizon_tail_s = 0.0;  // 0: one dive cycle
  double arrival_wait_s = 60.0;
};

struct Scenario {
  std::uint64_t seed = 1;
  double duration_s = 0.0;  // 0: run until the truth tracks end
  double tick_s = 1.0;
  double batch_period_s = 10.0;
  BoatConfig boat;
  UavConfig uav;
  std::vector<WhaleConfig> whales = {WhaleConfig{}};
  AcousticNoiseParams acoustic;
  DiveModelParams dive;
  SeparationParams separation;
  TrackerParams tracker;
  ManeuverParams maneuver;
  VhfSimConfig vhf;
  PlannerConfig planner;

  double planner_horizon_s() const;
  double planner_tail_s() const;
};

/// Parse a scenario config. Every block rejects unknown keys; violations
/// report the JSON field path. Defaults fill missing keys.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

/// Invariant checks (boat speed envelope, positive periods, ...). Throws
/// with a field path on the first violation.
void validate_scenario(const Scenario& s);

/// Canonical effective config (defaults included), used for hashing and the
/// run manifest.
nlohmann::json scenario_to_json(const Scenario& s);

std::uint64_t config_hash(const Scenario& s);

}  // namespace wrv
