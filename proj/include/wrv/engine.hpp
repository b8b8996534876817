#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "wrv/scenario.hpp"

namespace wrv {

struct SurfacingMetric {
  int whale_id = 0;
  int index = 0;             // which surfacing of this whale
  double min_error_m = 0.0;  // minimum localization error over the window
  double t_min_rel_s = 0.0;  // when the minimum occurred, relative to start
  bool valid = false;        // an estimate existed during the window
};

struct AttemptMetric {
  double takeoff_t_s = 0.0;
  bool success = false;
  double best_distance_m = -1.0;  // closest surfaced approach, -1 if none
  double flight_time_used_s = 0.0;
};

struct Metrics {
  std::vector<SurfacingMetric> surfacings;
  std::vector<AttemptMetric> attempts;
  bool any_success = false;
  int reinit_count = 0;
  double side_resolution_time_s = -1.0;  // first belief at >= 0.99, -1 if never
  bool uav_ditched = false;
};

/// Execute one closed-loop scenario. When trace is non-null every event is
/// appended as one JSON object per line ({t, kind, payload}).
Metrics run_scenario(const Scenario& scenario, std::ostream* trace = nullptr);

/// Long-format CSV (metric,whale_id,index,value); byte-stable for a fixed
/// scenario and seed.
std::string metrics_to_csv(const Metrics& m);

}  // namespace wrv
