#include "wrv/dive_model.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace wrv {

namespace {

// Truncated Gaussian via rejection; falls back to the floor when the bound
// is unreachable (e.g. zero variance with lo > mu).
double trunc_gauss_s(double mu_min, double sigma_min, double lo_s,
                     std::mt19937_64& rng) {
  const double mu = mu_min * 60.0;
  const double sigma = sigma_min * 60.0;
  if (sigma <= 0.0) return std::max(mu, lo_s);
  std::normal_distribution<double> dist(mu, sigma);
  for (int i = 0; i < 256; ++i) {
    const double v = dist(rng);
    if (v >= lo_s) return v;
  }
  return lo_s;
}

}  // namespace

SurfaceSchedule sample_schedule(const DiveModelParams& params,
                                double anchor_time_s, DiveAnchorState anchor,
                                double horizon_s, std::mt19937_64& rng,
                                double now_s) {
  if (horizon_s <= 0.0) throw std::invalid_argument("sample_schedule: horizon must be positive");
  const double floor_s = params.min_duration_min * 60.0;
  const double elapsed = std::max(0.0, now_s - anchor_time_s);
  const double horizon_end = std::max(anchor_time_s, now_s) + horizon_s;

  SurfaceSchedule out;
  out.anchor_s = anchor_time_s;

  double t = anchor_time_s;
  bool first = true;
  if (anchor == DiveAnchorState::underwater_since) {
    t += trunc_gauss_s(params.mu_underwater_min, params.sigma_underwater_min,
                       std::max(floor_s, elapsed), rng);
    first = false;  // elapsed-time conditioning already applied
  }

  while (t < horizon_end) {
    const double lo = first ? std::max(floor_s, elapsed) : floor_s;
    const double surf = trunc_gauss_s(params.mu_surface_min,
                                      params.sigma_surface_min, lo, rng);
    out.intervals.emplace_back(t, t + surf);
    t += surf;
    t += trunc_gauss_s(params.mu_underwater_min, params.sigma_underwater_min,
                       floor_s, rng);
    first = false;
  }
  return out;
}

bool is_surfaced(const SurfaceSchedule& schedule, double t_s) {
  for (const auto& [start, end] : schedule.intervals) {
    if (t_s >= start && t_s < end) return true;
    if (start > t_s) break;
  }
  return false;
}

double next_boundary_after(const SurfaceSchedule& schedule, double t_s) {
  for (const auto& [start, end] : schedule.intervals) {
    if (start > t_s) return start;
    if (end > t_s) return end;
  }
  return std::numeric_limits<double>::infinity();
}

double cycle_period_s(const DiveModelParams& params) {
  return (params.mu_underwater_min + params.mu_surface_min) * 60.0;
}

}  // namespace wrv
