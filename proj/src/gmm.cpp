#include "wrv/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wrv/rng.hpp"

namespace wrv {

namespace {

double wrap_to_pi_interval(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

// Midpoint of the largest empty arc on the circle of circumference pi.
// Rotating this point to the origin keeps every cluster away from the cut.
double gap_cut(const std::vector<double>& points) {
  if (points.size() < 2) return 0.0;
  std::vector<double> sorted(points);
  std::sort(sorted.begin(), sorted.end());
  double best_gap = kPi - sorted.back() + sorted.front();
  double cut = wrap_to_pi_interval(sorted.back() + best_gap / 2.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double gap = sorted[i + 1] - sorted[i];
    if (gap > best_gap) {
      best_gap = gap;
      cut = sorted[i] + gap / 2.0;
    }
  }
  return cut;
}

struct EmResult {
  std::vector<double> means, sigmas, weights;
  double loglik = 0.0;
};

EmResult run_em(const std::vector<double>& x, int n,
                const SeparationParams& params, std::mt19937_64& rng) {
  const std::size_t N = x.size();
  EmResult g;
  g.weights.assign(n, 1.0 / n);
  g.means.resize(n);
  g.sigmas.resize(n);

  // init: n distinct sample points as means, pooled std as shared sigma
  std::vector<std::size_t> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  double mean_all = 0.0;
  for (double v : x) mean_all += v;
  mean_all /= static_cast<double>(N);
  double var_all = 0.0;
  for (double v : x) var_all += (v - mean_all) * (v - mean_all);
  var_all /= static_cast<double>(N);
  const double sigma0 =
      std::max(params.sigma_floor_rad, std::sqrt(var_all) / std::max(1, n));
  for (int j = 0; j < n; ++j) {
    g.means[j] = x[idx[j % N]];
    g.sigmas[j] = sigma0;
  }

  std::vector<double> resp(N * n);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < params.em_max_iters; ++iter) {
    // E step
    double ll = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double row_max = -std::numeric_limits<double>::infinity();
      int row_arg = 0;
      for (int j = 0; j < n; ++j) {
        const double z = (x[i] - g.means[j]) / g.sigmas[j];
        const double lt =
            (g.weights[j] > 0.0 ? std::log(g.weights[j])
                                : -std::numeric_limits<double>::infinity()) -
            0.5 * z * z - std::log(g.sigmas[j]);
        resp[i * n + j] = lt;
        if (lt > row_max) {
          row_max = lt;
          row_arg = j;
        }
      }
      double row_sum = 0.0;
      for (int j = 0; j < n; ++j) {
        resp[i * n + j] = std::exp(resp[i * n + j] - row_max);
        row_sum += resp[i * n + j];
      }
      if (row_sum <= 0.0 || !std::isfinite(row_sum)) {
        std::fill(&resp[i * n], &resp[i * n] + n, 0.0);
        resp[i * n + row_arg] = 1.0;
        row_sum = 1.0;
      }
      for (int j = 0; j < n; ++j) resp[i * n + j] /= row_sum;
      ll += row_max + std::log(row_sum) - 0.5 * std::log(2.0 * kPi);
    }
    // EM increases the likelihood; a real decrease means a bug
    if (ll < prev_ll - 1e-7 * (1.0 + std::fabs(prev_ll))) {
      throw std::logic_error("gmm: EM log-likelihood decreased");
    }
    const bool converged = std::fabs(ll - prev_ll) < params.em_tol;
    prev_ll = ll;
    if (converged) break;

    // M step
    for (int j = 0; j < n; ++j) {
      double rsum = 0.0, mu = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        rsum += resp[i * n + j];
        mu += resp[i * n + j] * x[i];
      }
      g.weights[j] = rsum / static_cast<double>(N);
      if (rsum > 0.0) {
        mu /= rsum;
        double var = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          var += resp[i * n + j] * (x[i] - mu) * (x[i] - mu);
        }
        var /= rsum;
        g.means[j] = mu;
        g.sigmas[j] = std::max(params.sigma_floor_rad, std::sqrt(var));
      } else {
        g.sigmas[j] = params.sigma_floor_rad;
      }
    }
  }
  g.loglik = prev_ll;
  return g;
}

}  // namespace

GMMFit fit_gmm(const std::vector<double>& points, int n,
               const SeparationParams& params, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("fit_gmm: n must be >= 1");
  if (points.size() < static_cast<std::size_t>(n)) {
    throw std::invalid_argument("fit_gmm: underdetermined (fewer points than components)");
  }

  const double cut = gap_cut(points);
  std::vector<double> rotated(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    rotated[i] = wrap_to_pi_interval(points[i] - cut);
  }

  // Independent stream per restart; result is deterministic for a fixed
  // seed regardless of evaluation order.
  const std::uint64_t base = rng();
  EmResult best;
  best.loglik = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, params.restarts); ++r) {
    std::mt19937_64 restart_rng(splitmix64(base + static_cast<std::uint64_t>(r)));
    EmResult g = run_em(rotated, n, params, restart_rng);
    if (g.loglik > best.loglik) best = g;
  }

  GMMFit fit;
  fit.n = n;
  fit.sigmas = best.sigmas;
  fit.weights = best.weights;
  fit.loglik = best.loglik;
  fit.means.resize(n);
  for (int j = 0; j < n; ++j) {
    fit.means[j] = wrap_to_pi_interval(best.means[j] + cut);
  }
  fit.assignments.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    int arg = 0;
    double best_lt = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      const double z = (rotated[i] - best.means[j]) / best.sigmas[j];
      const double lt =
          (best.weights[j] > 0.0 ? std::log(best.weights[j])
                                 : -std::numeric_limits<double>::infinity()) -
          0.5 * z * z - std::log(best.sigmas[j]);
      if (lt > best_lt) {
        best_lt = lt;
        arg = j;
      }
    }
    fit.assignments[i] = arg;
  }
  return fit;
}

double bic(const GMMFit& fit, std::size_t n_points) {
  const double p = 3.0 * fit.n - 1.0;  // n means, n sigmas, n-1 weights
  return p * std::log(static_cast<double>(n_points)) - 2.0 * fit.loglik;
}

GMMFit select_model(const std::vector<double>& points,
                    const SeparationParams& params, std::mt19937_64& rng) {
  if (points.empty()) throw std::invalid_argument("select_model: empty batch");
  const int n_max = static_cast<int>(
      std::min<std::size_t>(std::max(1, params.k), points.size()));
  GMMFit best;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    GMMFit fit = fit_gmm(points, n, params, rng);
    const double b = bic(fit, points.size());
    if (b < best_bic) {  // ascending n, strict <: ties keep the smaller model
      best_bic = b;
      best = fit;
    }
  }
  return best;
}

}  // namespace wrv
