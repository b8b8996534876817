#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "wrv/gmm.hpp"
#include "wrv/rng.hpp"

using namespace wrv;

namespace {

std::vector<double> gaussian_cluster(double mean_deg, double sigma_deg, int n,
                                     std::mt19937_64& rng) {
  std::normal_distribution<double> d(deg2rad(mean_deg), deg2rad(sigma_deg));
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double v = std::fmod(d(rng), kPi);
    if (v < 0.0) v += kPi;
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("fit_gmm: single component recovers mean and MLE std") {
  auto rng = std::mt19937_64(1);
  auto data_rng = std::mt19937_64(2);
  const auto pts = gaussian_cluster(70.0, 4.0, 500, data_rng);
  double mean = 0.0;
  for (double p : pts) mean += p;
  mean /= pts.size();
  double var = 0.0;
  for (double p : pts) var += (p - mean) * (p - mean);
  var /= pts.size();

  SeparationParams params;
  const GMMFit fit = fit_gmm(pts, 1, params, rng);
  CHECK(fit.means[0] == doctest::Approx(mean).epsilon(1e-6));
  CHECK(fit.sigmas[0] == doctest::Approx(std::sqrt(var)).epsilon(1e-6));
  CHECK(fit.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("fit_gmm: two well-separated clusters land within a degree") {
  auto rng = std::mt19937_64(3);
  auto data_rng = std::mt19937_64(4);
  auto pts = gaussian_cluster(30.0, 2.0, 100, data_rng);
  const auto second = gaussian_cluster(120.0, 2.0, 100, data_rng);
  pts.insert(pts.end(), second.begin(), second.end());

  SeparationParams params;
  const GMMFit fit = fit_gmm(pts, 2, params, rng);
  std::vector<double> means = fit.means;
  std::sort(means.begin(), means.end());
  CHECK(rad2deg(means[0]) == doctest::Approx(30.0).epsilon(0.04));
  CHECK(rad2deg(means[1]) == doctest::Approx(120.0).epsilon(0.04));
  double wsum = 0.0;
  for (double w : fit.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit_gmm: identical points clamp sigma to the floor") {
  auto rng = std::mt19937_64(5);
  const std::vector<double> pts(50, 1.0);
  SeparationParams params;
  const GMMFit fit = fit_gmm(pts, 1, params, rng);
  CHECK(fit.sigmas[0] == doctest::Approx(params.sigma_floor_rad));
}

TEST_CASE("fit_gmm: errors") {
  auto rng = std::mt19937_64(6);
  SeparationParams params;
  CHECK_THROWS_AS(fit_gmm({0.1, 0.2}, 3, params, rng), std::invalid_argument);
  CHECK_THROWS_AS(select_model({}, params, rng), std::invalid_argument);
}

TEST_CASE("fit_gmm: cluster straddling the fold boundary") {
  // points hugging 0 and pi are one physical cluster on the folded circle
  auto rng = std::mt19937_64(7);
  std::vector<double> pts;
  auto data_rng = std::mt19937_64(8);
  std::normal_distribution<double> d(0.0, deg2rad(2.0));
  for (int i = 0; i < 200; ++i) {
    double v = d(data_rng);
    if (v < 0.0) v += kPi;  // folded wrap
    pts.push_back(v);
  }
  SeparationParams params;
  params.k = 3;
  const GMMFit fit = select_model(pts, params, rng);
  CHECK(fit.n == 1);
  const double d0 = circ_dist_pi(fit.means[0], 0.0);
  CHECK(rad2deg(d0) < 1.0);
}

TEST_CASE("select_model: BIC picks 1 for a tight cluster, 3 for three") {
  SeparationParams params;
  params.k = 5;

  auto rng = std::mt19937_64(9);
  auto data_rng = std::mt19937_64(10);
  const auto single = gaussian_cluster(50.0, 3.0, 150, data_rng);
  CHECK(select_model(single, params, rng).n == 1);

  auto pts = gaussian_cluster(20.0, 3.0, 100, data_rng);
  auto c2 = gaussian_cluster(90.0, 3.0, 100, data_rng);
  auto c3 = gaussian_cluster(160.0, 3.0, 100, data_rng);
  pts.insert(pts.end(), c2.begin(), c2.end());
  pts.insert(pts.end(), c3.begin(), c3.end());
  const GMMFit fit = select_model(pts, params, rng);
  CHECK(fit.n == 3);
}

TEST_CASE("select_model: k caps the component count") {
  SeparationParams params;
  params.k = 1;
  auto rng = std::mt19937_64(11);
  auto data_rng = std::mt19937_64(12);
  auto pts = gaussian_cluster(20.0, 2.0, 80, data_rng);
  const auto far = gaussian_cluster(150.0, 2.0, 80, data_rng);
  pts.insert(pts.end(), far.begin(), far.end());
  CHECK(select_model(pts, params, rng).n == 1);
}

TEST_CASE("select_model: recovery rate over seeded trials") {
  // clusters separated by >= 6 sigma with >= 50 points each: the true count
  // must be recovered in at least 95% of 200 trials
  SeparationParams params;
  params.k = 5;
  int hits = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    auto data_rng = std::mt19937_64(1000 + trial);
    auto fit_rng = std::mt19937_64(2000 + trial);
    auto pts = gaussian_cluster(25.0, 3.0, 60, data_rng);
    auto c2 = gaussian_cluster(85.0, 3.0, 60, data_rng);
    auto c3 = gaussian_cluster(145.0, 3.0, 60, data_rng);
    pts.insert(pts.end(), c2.begin(), c2.end());
    pts.insert(pts.end(), c3.begin(), c3.end());
    if (select_model(pts, params, fit_rng).n == 3) ++hits;
  }
  CHECK(hits >= static_cast<int>(0.95 * trials));
}

TEST_CASE("fit_gmm: deterministic for a fixed seed") {
  auto data_rng = std::mt19937_64(13);
  const auto pts = gaussian_cluster(60.0, 5.0, 120, data_rng);
  SeparationParams params;
  auto rng_a = std::mt19937_64(77);
  auto rng_b = std::mt19937_64(77);
  const GMMFit a = fit_gmm(pts, 2, params, rng_a);
  const GMMFit b = fit_gmm(pts, 2, params, rng_b);
  CHECK(a.loglik == b.loglik);
  CHECK(a.means == b.means);
}
