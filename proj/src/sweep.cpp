#include "wrv/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "wrv/rng.hpp"

namespace wrv {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile

struct CellStats {
  std::vector<double> min_errors;
  std::vector<double> t_mins;
  int successes = 0;
  int runs = 0;
};

CellStats run_cell(Scenario sc, int trials, std::uint64_t seed_base) {
  CellStats stats;
  for (int trial = 0; trial < trials; ++trial) {
    sc.seed = derive_seed(seed_base, "trial", static_cast<std::uint64_t>(trial));
    const Metrics m = run_scenario(sc, nullptr);
    for (const auto& s : m.surfacings) {
      if (!s.valid) continue;
      stats.min_errors.push_back(s.min_error_m);
      stats.t_mins.push_back(s.t_min_rel_s);
    }
    stats.runs += 1;
    if (m.any_success) stats.successes += 1;
  }
  return stats;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

}  // namespace

std::vector<NoiseCell> sweep_noise(const Scenario& base, int trials,
                                   std::uint64_t seed_base) {
  const std::vector<double> sigmas = {0.1, 5.0, 10.0, 15.0};
  const std::vector<bool> modes = {false, true};  // acoustic, acoustic+VHF

  struct Spec {
    double sigma;
    bool vhf;
  };
  std::vector<Spec> specs;
  for (double s : sigmas) {
    for (bool v : modes) specs.push_back({s, v});
  }

  std::vector<std::future<CellStats>> futures;
  futures.reserve(specs.size());
  for (const auto& spec : specs) {
    Scenario sc = base;
    sc.acoustic.sigma_deg = spec.sigma;
    sc.vhf.enabled = spec.vhf;
    futures.push_back(std::async(std::launch::async, run_cell, sc, trials, seed_base));
  }

  std::vector<NoiseCell> cells(specs.size());
  double baseline_mean = 1.0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const CellStats stats = futures[i].get();
    NoiseCell& c = cells[i];
    c.sigma_deg = specs[i].sigma;
    c.vhf = specs[i].vhf;
    c.n_samples = static_cast<int>(stats.min_errors.size());
    c.mean_m = mean_of(stats.min_errors);
    c.stddev_m = stddev_of(stats.min_errors, c.mean_m);
    c.ci99_m = c.n_samples > 0 ? kZ99 * c.stddev_m / std::sqrt(c.n_samples) : 0.0;
    c.median_t_min_s = median_of(stats.t_mins);
    if (!specs[i].vhf && specs[i].sigma == 0.1) baseline_mean = c.mean_m;
  }
  for (auto& c : cells) {
    c.rel_mean = baseline_mean > 0.0 ? c.mean_m / baseline_mean : 0.0;
    c.rel_ci = baseline_mean > 0.0 ? c.ci99_m / baseline_mean : 0.0;
  }
  return cells;
}

std::vector<FlightCell> sweep_flight(const Scenario& base,
                                     const std::vector<double>& budgets_s,
                                     int runs, std::uint64_t seed_base) {
  std::vector<std::future<CellStats>> futures;
  futures.reserve(budgets_s.size());
  for (double budget : budgets_s) {
    Scenario sc = base;
    sc.uav.flight_budget_s = budget;
    futures.push_back(std::async(std::launch::async, run_cell, sc, runs, seed_base));
  }
  std::vector<FlightCell> cells(budgets_s.size());
  for (std::size_t i = 0; i < budgets_s.size(); ++i) {
    const CellStats stats = futures[i].get();
    cells[i].budget_s = budgets_s[i];
    cells[i].runs = stats.runs;
    cells[i].successes = stats.successes;
    cells[i].success_rate =
        stats.runs > 0 ? static_cast<double>(stats.successes) / stats.runs : 0.0;
  }
  return cells;
}

std::string noise_table_csv(const std::vector<NoiseCell>& cells) {
  std::ostringstream out;
  char buf[240];
  out << "sigma_deg,mode,n,mean_m,stddev_m,ci99_m,rel_mean,rel_ci,median_t_min_s\n";
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof(buf), "%.1f,%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  c.sigma_deg, c.vhf ? "acoustic+vhf" : "acoustic", c.n_samples,
                  c.mean_m, c.stddev_m, c.ci99_m, c.rel_mean, c.rel_ci,
                  c.median_t_min_s);
    out << buf;
  }
  return out.str();
}

std::string flight_table_csv(const std::vector<FlightCell>& cells) {
  std::ostringstream out;
  char buf[160];
  out << "flight_budget_min,runs,successes,success_rate\n";
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof(buf), "%.1f,%d,%d,%.6f\n", c.budget_s / 60.0,
                  c.runs, c.successes, c.success_rate);
    out << buf;
  }
  return out.str();
}

}  // namespace wrv
