#pragma once
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wrv/dive_model.hpp"
#include "wrv/world.hpp"

namespace wrv {

/// Ground-truth whale track: piecewise-linear position over time plus
/// surface intervals.
struct WhaleTruth {
  int id = 0;
  bool tagged = false;
  std::vector<double> ts;
  std::vector<Vec2> xs;
  std::vector<std::pair<double, double>> surface_intervals;

  Vec2 position(double t_s) const;
  bool surfaced(double t_s) const;
  double duration_s() const { return ts.empty() ? 0.0 : ts.back(); }
};

/// Load one whale track from CSV with columns
///   t_s, whale_id, x_m, y_m, surfaced_flag
/// (header optional). Time must be strictly increasing per whale; validation
/// errors name the offending row. Surface intervals come from 0/1 flag
/// transitions. Multiple whale ids in one file yield multiple tracks.
std::vector<WhaleTruth> load_trajectory(const std::string& path);

struct SynthWhaleParams {
  double x0 = 0.0;
  double y0 = 0.0;
  double speed_min_mps = 0.5;
  double speed_max_mps = 2.0;
  double turn_sigma_rad = 0.05;  // heading random walk per sqrt(s)
  int n_surfacings = 3;
};

/// Correlated-random-walk whale with dive-model surfacing, covering
/// n_surfacings full surface intervals.
WhaleTruth synth_trajectory(int id, const SynthWhaleParams& params,
                            const DiveModelParams& dive, std::mt19937_64& rng);

/// Serialize tracks to the CSV format accepted by load_trajectory.
void write_trajectory_csv(const std::string& path,
                          const std::vector<WhaleTruth>& whales, double step_s = 5.0);

}  // namespace wrv
