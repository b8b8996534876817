#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "wrv/engine.hpp"
#include "wrv/scenario.hpp"

namespace wrv {

/// Aggregate statistics of per-surfacing minimum localization error for one
/// sweep cell (sensor noise level x sensor mode).
struct NoiseCell {
  double sigma_deg = 0.0;
  bool vhf = false;
  int n_samples = 0;      // pooled surfacings across trials
  double mean_m = 0.0;
  double stddev_m = 0.0;
  double ci99_m = 0.0;    // 99% normal CI half-width of the mean
  double rel_mean = 0.0;  // relative to the acoustic-only 0.1 deg cell
  double rel_ci = 0.0;
  double median_t_min_s = 0.0;  // when the minimum occurs within the surfacing
};

/// The noise sweep behind the relative-error table: sigma in
/// {0.1, 5, 10, 15} degrees x {acoustic, acoustic+VHF}, `trials` runs per
/// cell. Seeds are paired across cells so every cell sees the same whale
/// trajectories and scaled noise draws. Cells run in parallel; aggregation is
/// order-independent.
std::vector<NoiseCell> sweep_noise(const Scenario& base, int trials,
                                   std::uint64_t seed_base);

struct FlightCell {
  double budget_s = 0.0;
  int runs = 0;
  int successes = 0;
  double success_rate = 0.0;
};

/// Rendezvous success rate per flight-time budget (seconds), `runs` runs per
/// budget with paired seeds.
std::vector<FlightCell> sweep_flight(const Scenario& base,
                                     const std::vector<double>& budgets_s,
                                     int runs, std::uint64_t seed_base);

std::string noise_table_csv(const std::vector<NoiseCell>& cells);
std::string flight_table_csv(const std::vector<FlightCell>& cells);

}  // namespace wrv
