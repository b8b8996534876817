#pragma once
#include <random>
#include <utility>
#include <vector>

namespace wrv {

/// Alternating underwater/surface duration model. Durations are Gaussian in
/// minutes, truncated below at min_duration_min.
struct DiveModelParams {
  double mu_underwater_min = 34.0;
  double sigma_underwater_min = 19.0;
  double mu_surface_min = 9.0;
  double sigma_surface_min = 3.0;
  double min_duration_min = 1.0;
};

enum class DiveAnchorState { underwater_since, surfaced_since };

/// Sampled surface intervals (seconds, absolute time) over a planning
/// horizon. Intervals are strictly increasing and non-overlapping.
struct SurfaceSchedule {
  std::vector<std::pair<double, double>> intervals;
  double anchor_s = 0.0;
};

/// Draw one alternating dive/surface schedule starting from the last observed
/// dive-start or surface-start event. When now_s > anchor_time_s the first
/// duration is conditioned on the elapsed time (samples shorter than the
/// elapsed time are rejected; with zero variance the boundary clips to now).
SurfaceSchedule sample_schedule(const DiveModelParams& params,
                                double anchor_time_s, DiveAnchorState anchor,
                                double horizon_s, std::mt19937_64& rng,
                                double now_s);

inline SurfaceSchedule sample_schedule(const DiveModelParams& params,
                                       double anchor_time_s,
                                       DiveAnchorState anchor, double horizon_s,
                                       std::mt19937_64& rng) {
  return sample_schedule(params, anchor_time_s, anchor, horizon_s, rng,
                         anchor_time_s);
}

/// True iff t falls in some interval; closed on start, open on end.
bool is_surfaced(const SurfaceSchedule& schedule, double t_s);

/// Earliest interval start or end strictly after t, or +inf if none.
double next_boundary_after(const SurfaceSchedule& schedule, double t_s);

/// Dive cycle period in seconds (mean underwater + mean surface).
double cycle_period_s(const DiveModelParams& params);

}  // namespace wrv
