#pragma once
#include <random>
#include <vector>

#include "wrv/world.hpp"

namespace wrv {

/// 1-D Gaussian mixture fit over folded AOAs.
struct GMMFit {
  int n = 0;
  std::vector<double> means;    // radians in [0, pi)
  std::vector<double> sigmas;   // radians, >= sigma_floor
  std::vector<double> weights;  // simplex
  double loglik = 0.0;
  std::vector<int> assignments;  // per-point argmax component
};

struct SeparationParams {
  int k = 3;                // user cap on the number of whale groups
  int em_max_iters = 200;
  double em_tol = 1e-6;     // absolute log-likelihood delta
  int restarts = 5;
  double sigma_floor_rad = deg2rad(0.2);
};

/// EM fit with a fixed component count. Points live on the half circle
/// [0, pi); before fitting they are rotated so the largest empty gap sits at
/// the cut, which keeps plain linear EM valid, and means are rotated back.
/// Best of `restarts` seeded initializations. Throws "underdetermined" when
/// there are fewer points than components.
GMMFit fit_gmm(const std::vector<double>& points, int n,
               const SeparationParams& params, std::mt19937_64& rng);

/// Fit n = 1..min(k, N) and return the fit minimizing
/// BIC = (3n - 1) ln N - 2 loglik; ties break toward smaller n.
/// Throws "empty batch" on empty input.
GMMFit select_model(const std::vector<double>& points,
                    const SeparationParams& params, std::mt19937_64& rng);

double bic(const GMMFit& fit, std::size_t n_points);

}  // namespace wrv
