#include "wrv/scenario.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "wrv/rng.hpp"

namespace wrv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("config: " + path + ": " + what);
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
  }
}

template <typename T>
void read(const json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "wrong type");
  }
}

void parse_boat(const json& j, const std::string& path, BoatConfig& b) {
  reject_unknown(j, path, {"x", "y", "heading_deg", "speed_mps",
                           "array_offset_m", "enforce_speed_range"});
  read(j, path, "x", b.x);
  read(j, path, "y", b.y);
  read(j, path, "heading_deg", b.heading_deg);
  read(j, path, "speed_mps", b.speed_mps);
  read(j, path, "array_offset_m", b.array_offset_m);
  read(j, path, "enforce_speed_range", b.enforce_speed_range);
}

void parse_whale(const json& j, const std::string& path, WhaleConfig& w) {
  reject_unknown(j, path,
                 {"source", "path", "tagged", "x", "y", "speed_min_mps",
                  "speed_max_mps", "turn_sigma_rad", "n_surfacings"});
  read(j, path, "source", w.source);
  read(j, path, "path", w.path);
  read(j, path, "tagged", w.tagged);
  read(j, path, "x", w.synth.x0);
  read(j, path, "y", w.synth.y0);
  read(j, path, "speed_min_mps", w.synth.speed_min_mps);
  read(j, path, "speed_max_mps", w.synth.speed_max_mps);
  read(j, path, "turn_sigma_rad", w.synth.turn_sigma_rad);
  read(j, path, "n_surfacings", w.synth.n_surfacings);
  if (w.source != "synthetic" && w.source != "csv") {
    fail(path + ".source", "must be \"synthetic\" or \"csv\"");
  }
  if (w.source == "csv" && w.path.empty()) fail(path + ".path", "required for csv source");
}

}  // namespace

double Scenario::planner_horizon_s() const {
  return planner.horizon_s > 0.0 ? planner.horizon_s : 2.0 * cycle_period_s(dive);
}

double Scenario::planner_tail_s() const {
  return planner.horizon_tail_s > 0.0 ? planner.horizon_tail_s : cycle_period_s(dive);
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  reject_unknown(j, "$",
                 {"seed", "duration_s", "tick_s", "batch_period_s", "boat",
                  "uav", "whales", "acoustic", "dive_model", "separation",
                  "tracker", "maneuver", "vhf", "planner"});
  read(j, "$", "seed", s.seed);
  read(j, "$", "duration_s", s.duration_s);
  read(j, "$", "tick_s", s.tick_s);
  read(j, "$", "batch_period_s", s.batch_period_s);

  if (j.contains("boat")) parse_boat(j.at("boat"), "$.boat", s.boat);

  if (j.contains("uav")) {
    const auto& u = j.at("uav");
    reject_unknown(u, "$.uav", {"max_speed_mps", "flight_budget_s"});
    read(u, "$.uav", "max_speed_mps", s.uav.max_speed_mps);
    read(u, "$.uav", "flight_budget_s", s.uav.flight_budget_s);
  }

  if (j.contains("whales")) {
    const auto& ws = j.at("whales");
    if (!ws.is_array()) fail("$.whales", "expected an array");
    s.whales.clear();
    int i = 0;
    for (const auto& wj : ws) {
      WhaleConfig w;
      parse_whale(wj, "$.whales[" + std::to_string(i) + "]", w);
      s.whales.push_back(w);
      ++i;
    }
  }

  if (j.contains("acoustic")) {
    const auto& a = j.at("acoustic");
    reject_unknown(a, "$.acoustic",
                   {"sigma_deg", "clicks_per_batch", "amplitude_scale"});
    read(a, "$.acoustic", "sigma_deg", s.acoustic.sigma_deg);
    read(a, "$.acoustic", "clicks_per_batch", s.acoustic.clicks_per_batch);
    read(a, "$.acoustic", "amplitude_scale", s.acoustic.amplitude_scale);
  }

  if (j.contains("dive_model")) {
    const auto& d = j.at("dive_model");
    reject_unknown(d, "$.dive_model",
                   {"mu_underwater_min", "sigma_underwater_min",
                    "mu_surface_min", "sigma_surface_min", "min_duration_min"});
    read(d, "$.dive_model", "mu_underwater_min", s.dive.mu_underwater_min);
    read(d, "$.dive_model", "sigma_underwater_min", s.dive.sigma_underwater_min);
    read(d, "$.dive_model", "mu_surface_min", s.dive.mu_surface_min);
    read(d, "$.dive_model", "sigma_surface_min", s.dive.sigma_surface_min);
    read(d, "$.dive_model", "min_duration_min", s.dive.min_duration_min);
  }

  if (j.contains("separation")) {
    const auto& g = j.at("separation");
    reject_unknown(g, "$.separation",
                   {"k", "em_max_iters", "em_tol", "restarts", "sigma_floor_deg"});
    read(g, "$.separation", "k", s.separation.k);
    read(g, "$.separation", "em_max_iters", s.separation.em_max_iters);
    read(g, "$.separation", "em_tol", s.separation.em_tol);
    read(g, "$.separation", "restarts", s.separation.restarts);
    double floor_deg = rad2deg(s.separation.sigma_floor_rad);
    read(g, "$.separation", "sigma_floor_deg", floor_deg);
    s.separation.sigma_floor_rad = deg2rad(floor_deg);
  }

  if (j.contains("tracker")) {
    const auto& t = j.at("tracker");
    reject_unknown(t, "$.tracker",
                   {"particle_count", "init_range_max_m", "motion_speed_max_mps",
                    "delta_silent_s", "ess_frac", "amp_reject_quantile"});
    read(t, "$.tracker", "particle_count", s.tracker.particle_count);
    read(t, "$.tracker", "init_range_max_m", s.tracker.init_range_max_m);
    read(t, "$.tracker", "motion_speed_max_mps", s.tracker.motion_speed_max_mps);
    read(t, "$.tracker", "delta_silent_s", s.tracker.delta_silent_s);
    read(t, "$.tracker", "ess_frac", s.tracker.ess_frac);
    read(t, "$.tracker", "amp_reject_quantile", s.tracker.amp_reject_quantile);
  }

  if (j.contains("maneuver")) {
    const auto& m = j.at("maneuver");
    reject_unknown(m, "$.maneuver",
                   {"decision_period_s", "turn_options_deg", "amplitude_threshold",
                    "enable_followup_180", "followup_180_delay_s"});
    read(m, "$.maneuver", "decision_period_s", s.maneuver.decision_period_s);
    read(m, "$.maneuver", "turn_options_deg", s.maneuver.turn_options_deg);
    read(m, "$.maneuver", "amplitude_threshold", s.maneuver.amplitude_threshold);
    read(m, "$.maneuver", "enable_followup_180", s.maneuver.enable_followup_180);
    read(m, "$.maneuver", "followup_180_delay_s", s.maneuver.followup_180_delay_s);
  }

  if (j.contains("vhf")) {
    const auto& v = j.at("vhf");
    reject_unknown(v, "$.vhf", {"enabled", "sigma_deg", "match_gate_m"});
    read(v, "$.vhf", "enabled", s.vhf.enabled);
    read(v, "$.vhf", "sigma_deg", s.vhf.sigma_deg);
    read(v, "$.vhf", "match_gate_m", s.vhf.match_gate_m);
  }

  if (j.contains("planner")) {
    const auto& p = j.at("planner");
    reject_unknown(p, "$.planner",
                   {"particle_count", "stage_cap_s", "rendezvous_radius_m",
                    "horizon_s", "horizon_tail_s", "arrival_wait_s"});
    read(p, "$.planner", "particle_count", s.planner.particle_count);
    read(p, "$.planner", "stage_cap_s", s.planner.stage_cap_s);
    read(p, "$.planner", "rendezvous_radius_m", s.planner.rendezvous_radius_m);
    read(p, "$.planner", "horizon_s", s.planner.horizon_s);
    read(p, "$.planner", "horizon_tail_s", s.planner.horizon_tail_s);
    read(p, "$.planner", "arrival_wait_s", s.planner.arrival_wait_s);
  }

  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config: " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

void validate_scenario(const Scenario& s) {
  if (s.tick_s <= 0.0) fail("$.tick_s", "must be positive");
  if (s.duration_s < 0.0) fail("$.duration_s", "must be >= 0");
  if (s.batch_period_s <= 0.0) fail("$.batch_period_s", "must be positive");
  if (s.boat.enforce_speed_range &&
      (s.boat.speed_mps < 2.0 || s.boat.speed_mps > 6.0)) {
    fail("$.boat.speed_mps", "outside the 2..6 m/s envelope");
  }
  if (s.boat.array_offset_m <= 0.0) fail("$.boat.array_offset_m", "must be positive");
  if (s.uav.max_speed_mps <= 0.0) fail("$.uav.max_speed_mps", "must be positive");
  if (s.uav.flight_budget_s < 0.0) fail("$.uav.flight_budget_s", "must be >= 0");
  if (s.whales.empty()) fail("$.whales", "at least one whale required");
  for (std::size_t i = 0; i < s.whales.size(); ++i) {
    const auto& w = s.whales[i].synth;
    const std::string p = "$.whales[" + std::to_string(i) + "]";
    if (w.speed_min_mps < 0.0 || w.speed_max_mps < w.speed_min_mps) {
      fail(p, "invalid speed range");
    }
    if (w.n_surfacings < 1) fail(p + ".n_surfacings", "must be >= 1");
  }
  if (s.acoustic.sigma_deg < 0.0) fail("$.acoustic.sigma_deg", "must be >= 0");
  if (s.acoustic.clicks_per_batch < 1) fail("$.acoustic.clicks_per_batch", "must be >= 1");
  if (s.acoustic.amplitude_scale <= 0.0) fail("$.acoustic.amplitude_scale", "must be positive");
  if (s.dive.mu_underwater_min <= 0.0 || s.dive.mu_surface_min <= 0.0) {
    fail("$.dive_model", "means must be positive");
  }
  if (s.dive.sigma_underwater_min < 0.0 || s.dive.sigma_surface_min < 0.0) {
    fail("$.dive_model", "sigmas must be >= 0");
  }
  if (s.dive.min_duration_min <= 0.0) fail("$.dive_model.min_duration_min", "must be positive");
  if (s.separation.k < 1) fail("$.separation.k", "must be >= 1");
  if (s.tracker.particle_count < 10) fail("$.tracker.particle_count", "must be >= 10");
  if (s.tracker.init_range_max_m <= 0.0) fail("$.tracker.init_range_max_m", "must be positive");
  if (s.tracker.ess_frac < 0.0 || s.tracker.ess_frac > 1.0) fail("$.tracker.ess_frac", "must be in [0, 1]");
  if (s.tracker.amp_reject_quantile <= 0.0 || s.tracker.amp_reject_quantile >= 1.0) {
    fail("$.tracker.amp_reject_quantile", "must be in (0, 1)");
  }
  if (s.maneuver.decision_period_s <= 0.0) fail("$.maneuver.decision_period_s", "must be positive");
  if (s.maneuver.turn_options_deg.empty()) fail("$.maneuver.turn_options_deg", "must be non-empty");
  if (s.vhf.sigma_deg <= 0.0) fail("$.vhf.sigma_deg", "must be positive");
  if (s.planner.particle_count < 1) fail("$.planner.particle_count", "must be >= 1");
  if (s.planner.stage_cap_s <= 0.0) fail("$.planner.stage_cap_s", "must be positive");
  if (s.planner.rendezvous_radius_m <= 0.0) fail("$.planner.rendezvous_radius_m", "must be positive");
  if (s.planner.horizon_s < 0.0) fail("$.planner.horizon_s", "must be >= 0");
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json j;
  j["seed"] = s.seed;
  j["duration_s"] = s.duration_s;
  j["tick_s"] = s.tick_s;
  j["batch_period_s"] = s.batch_period_s;
  j["boat"] = {{"x", s.boat.x},
               {"y", s.boat.y},
               {"heading_deg", s.boat.heading_deg},
               {"speed_mps", s.boat.speed_mps},
               {"array_offset_m", s.boat.array_offset_m},
               {"enforce_speed_range", s.boat.enforce_speed_range}};
  j["uav"] = {{"max_speed_mps", s.uav.max_speed_mps},
              {"flight_budget_s", s.uav.flight_budget_s}};
  j["whales"] = json::array();
  for (const auto& w : s.whales) {
    j["whales"].push_back({{"source", w.source},
                           {"path", w.path},
                           {"tagged", w.tagged},
                           {"x", w.synth.x0},
                           {"y", w.synth.y0},
                           {"speed_min_mps", w.synth.speed_min_mps},
                           {"speed_max_mps", w.synth.speed_max_mps},
                           {"turn_sigma_rad", w.synth.turn_sigma_rad},
                           {"n_surfacings", w.synth.n_surfacings}});
  }
  j["acoustic"] = {{"sigma_deg", s.acoustic.sigma_deg},
                   {"clicks_per_batch", s.acoustic.clicks_per_batch},
                   {"amplitude_scale", s.acoustic.amplitude_scale}};
  j["dive_model"] = {{"mu_underwater_min", s.dive.mu_underwater_min},
                     {"sigma_underwater_min", s.dive.sigma_underwater_min},
                     {"mu_surface_min", s.dive.mu_surface_min},
                     {"sigma_surface_min", s.dive.sigma_surface_min},
                     {"min_duration_min", s.dive.min_duration_min}};
  j["separation"] = {{"k", s.separation.k},
                     {"em_max_iters", s.separation.em_max_iters},
                     {"em_tol", s.separation.em_tol},
                     {"restarts", s.separation.restarts},
                     {"sigma_floor_deg", rad2deg(s.separation.sigma_floor_rad)}};
  j["tracker"] = {{"particle_count", s.tracker.particle_count},
                  {"init_range_max_m", s.tracker.init_range_max_m},
                  {"motion_speed_max_mps", s.tracker.motion_speed_max_mps},
                  {"delta_silent_s", s.tracker.delta_silent_s},
                  {"ess_frac", s.tracker.ess_frac},
                  {"amp_reject_quantile", s.tracker.amp_reject_quantile}};
  j["maneuver"] = {{"decision_period_s", s.maneuver.decision_period_s},
                   {"turn_options_deg", s.maneuver.turn_options_deg},
                   {"amplitude_threshold", s.maneuver.amplitude_threshold},
                   {"enable_followup_180", s.maneuver.enable_followup_180},
                   {"followup_180_delay_s", s.maneuver.followup_180_delay_s}};
  j["vhf"] = {{"enabled", s.vhf.enabled},
              {"sigma_deg", s.vhf.sigma_deg},
              {"match_gate_m", s.vhf.match_gate_m}};
  j["planner"] = {{"particle_count", s.planner.particle_count},
                  {"stage_cap_s", s.planner.stage_cap_s},
                  {"rendezvous_radius_m", s.planner.rendezvous_radius_m},
                  {"horizon_s", s.planner.horizon_s},
                  {"horizon_tail_s", s.planner.horizon_tail_s},
                  {"arrival_wait_s", s.planner.arrival_wait_s}};
  return j;
}

std::uint64_t config_hash(const Scenario& s) {
  return fnv1a(scenario_to_json(s).dump());
}

}  // namespace wrv
