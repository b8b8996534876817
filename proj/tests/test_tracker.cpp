#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "wrv/acoustic.hpp"
#include "wrv/tracker.hpp"

using namespace wrv;

namespace {

AoaCluster cluster(double mean_rad, double sigma_rad, double amp = 1.0) {
  AoaCluster c;
  c.mean_rad = mean_rad;
  c.sigma_rad = sigma_rad;
  c.mean_amplitude = amp;
  c.count = 20;
  return c;
}

double weight_sum(const Belief& b) {
  double s = 0.0;
  for (const auto& p : b.particles) s += p.weight;
  return s;
}

// intersection of two world-frame bearing rays (oracle for triangulation)
Vec2 ray_intersection(const Vec2& pa, double bearing_a, const Vec2& pb,
                      double bearing_b) {
  const double ax = std::cos(bearing_a), ay = std::sin(bearing_a);
  const double bx = std::cos(bearing_b), by = std::sin(bearing_b);
  const double det = ax * (-by) + bx * ay;
  REQUIRE(std::fabs(det) > 1e-12);
  const double rx = pb.x - pa.x, ry = pb.y - pa.y;
  const double s = (rx * (-by) + bx * ry) / det;
  return {pa.x + s * ax, pa.y + s * ay};
}

// one zero-noise "batch": a single perfect cluster for a whale seen from
// the given array pose
AoaCluster perfect_cluster(const Pose2D& array, const Vec2& whale,
                           const SeparationParams& sep, double amp = 1.0) {
  return cluster(fold_aoa(bearing(array, whale), array.heading),
                 sep.sigma_floor_rad, amp);
}

}  // namespace

TEST_CASE("init_belief: on-axis cluster collapses both sides onto the axis") {
  TrackerParams params;
  auto rng = std::mt19937_64(1);
  const Pose2D array(0, 0, 0);
  const Belief b = init_belief(0, cluster(0.0, 1e-9), array, params, rng, 0.0);
  REQUIRE(b.particles.size() == 500);
  for (const auto& p : b.particles) {
    CHECK(std::fabs(p.pos.y) < 1e-3);
    CHECK(p.pos.x >= -1e-9);
  }
}

TEST_CASE("init_belief: abeam cluster splits 50/50 across half-planes") {
  TrackerParams params;
  auto rng = std::mt19937_64(2);
  const Pose2D array(0, 0, 0);
  const Belief b =
      init_belief(0, cluster(kPi / 2, deg2rad(0.5)), array, params, rng, 0.0);
  int up = 0, down = 0;
  for (const auto& p : b.particles) {
    (p.pos.y > 0 ? up : down) += 1;
    CHECK(distance(p.pos, {0, 0}) <= params.init_range_max_m + 1e-9);
    CHECK((p.side == Side::left) == (p.pos.y > 0));
  }
  CHECK(up == 250);
  CHECK(down == 250);
  CHECK(weight_sum(b) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("predict: zero speed freezes positions, weights untouched") {
  TrackerParams params;
  params.motion_speed_max_mps = 0.0;
  auto rng = std::mt19937_64(3);
  Belief b = init_belief(0, cluster(1.0, 0.01), Pose2D(0, 0, 0), params, rng, 0.0);
  const auto before = b.particles;
  predict(b, 60.0, params, rng);
  for (std::size_t i = 0; i < b.particles.size(); ++i) {
    CHECK(b.particles[i].pos.x == before[i].pos.x);
    CHECK(b.particles[i].pos.y == before[i].pos.y);
    CHECK(b.particles[i].weight == before[i].weight);
  }
}

TEST_CASE("predict: displacement bounded by max speed times dt") {
  TrackerParams params;  // 2.5 m/s default
  auto rng = std::mt19937_64(4);
  Belief b = init_belief(0, cluster(1.0, 0.01), Pose2D(0, 0, 0), params, rng, 0.0);
  const auto before = b.particles;
  predict(b, 60.0, params, rng);
  for (std::size_t i = 0; i < b.particles.size(); ++i) {
    CHECK(distance(b.particles[i].pos, before[i].pos) <= 150.0 + 1e-9);
  }
}

TEST_CASE("update: constant likelihood leaves weights uniform") {
  TrackerParams params;
  params.particle_count = 100;
  auto rng = std::mt19937_64(5);
  const Pose2D array(0, 0, 0);
  Belief b = init_belief(0, cluster(0.7, 0.05), array, params, rng, 0.0);
  // place every particle exactly on the 0.7 ray (left unfold)
  for (std::size_t i = 0; i < b.particles.size(); ++i) {
    const double r = 100.0 + 5.0 * static_cast<double>(i);
    b.particles[i].pos = {r * std::cos(0.7), r * std::sin(0.7)};
  }
  const auto outcome = update(b, cluster(0.7, 0.05), array, params, rng);
  CHECK(outcome == UpdateOutcome::ok);
  for (const auto& p : b.particles) {
    CHECK(p.weight == doctest::Approx(0.01).epsilon(1e-9));
  }
}

TEST_CASE("update: all particles beyond 6 sigma raises the degenerate signal") {
  TrackerParams params;
  params.particle_count = 50;
  auto rng = std::mt19937_64(6);
  const Pose2D array(0, 0, 0);
  Belief b = init_belief(0, cluster(0.3, 1e-4), array, params, rng, 0.0);
  const auto before = b.particles;
  const auto outcome = update(b, cluster(1.5, 0.005), array, params, rng);
  CHECK(outcome == UpdateOutcome::degenerate);
  // belief untouched on degeneracy
  for (std::size_t i = 0; i < b.particles.size(); ++i) {
    CHECK(b.particles[i].weight == before[i].weight);
  }
}

TEST_CASE("reinit_on_degeneracy: repopulates both sides and counts") {
  TrackerParams params;
  auto rng = std::mt19937_64(7);
  const Pose2D array(0, 0, 0);
  Belief b = init_belief(3, cluster(0.4, 0.01), array, params, rng, 0.0);
  b.surfaced = true;
  reinit_on_degeneracy(b, cluster(1.2, 0.02), array, params, rng, 50.0);
  CHECK(b.id == 3);
  CHECK(b.surfaced);
  CHECK(b.reinit_count == 1);
  CHECK(weight_sum(b) == doctest::Approx(1.0).epsilon(1e-9));
  int left = 0, right = 0;
  for (const auto& p : b.particles) (p.side == Side::left ? left : right) += 1;
  CHECK(left > 0);
  CHECK(right > 0);
}

TEST_CASE("tracker survives repeated outlier clusters without NaNs") {
  TrackerParams params;
  params.particle_count = 60;
  auto rng = std::mt19937_64(8);
  std::uniform_real_distribution<double> umean(0.0, kPi - 1e-6);
  std::uniform_real_distribution<double> usig(1e-4, 0.05);
  const Pose2D array(0, 0, 0);
  Belief b = init_belief(0, cluster(0.5, 0.01), array, params, rng, 0.0);
  bool all_finite = true;
  for (int i = 0; i < 1000; ++i) {
    const AoaCluster c = cluster(umean(rng), usig(rng));
    predict(b, 10.0, params, rng);
    if (update(b, c, array, params, rng) == UpdateOutcome::degenerate) {
      reinit_on_degeneracy(b, c, array, params, rng, 10.0 * i);
    }
    for (const auto& p : b.particles) {
      all_finite = all_finite && std::isfinite(p.pos.x) &&
                   std::isfinite(p.pos.y) && std::isfinite(p.weight);
    }
    CHECK(weight_sum(b) == doctest::Approx(1.0).epsilon(1e-7));
  }
  CHECK(all_finite);
}

TEST_CASE("match_clusters: one belief, one cluster") {
  TrackerParams params;
  auto rng = std::mt19937_64(9);
  const Pose2D array(0, 0, 0);
  const std::vector<Belief> beliefs = {
      init_belief(0, cluster(0.8, 0.02), array, params, rng, 0.0)};
  const auto res = match_clusters(beliefs, {cluster(0.82, 0.02)}, array);
  REQUIRE(res.matches.size() == 1);
  CHECK(res.matches[0] == std::pair<int, int>{0, 0});
  CHECK(res.unmatched_beliefs.empty());
  CHECK(res.unmatched_clusters.empty());
}

TEST_CASE("match_clusters: 2 beliefs, 1 cluster leaves the far one unmatched") {
  TrackerParams params;
  params.particle_count = 10;
  const Pose2D array(0, 0, 0);
  // single-point beliefs: all particles at one spot
  auto point_belief = [&](int id, double angle) {
    auto rng = std::mt19937_64(100 + id);
    Belief b = init_belief(id, cluster(angle, 1e-6), array, params, rng, 0.0);
    for (auto& p : b.particles) {
      p.pos = {500 * std::cos(angle), 500 * std::sin(angle)};
      p.side = Side::left;
    }
    return b;
  };
  const std::vector<Belief> beliefs = {point_belief(0, 0.4), point_belief(1, 1.6)};
  const auto res = match_clusters(beliefs, {cluster(1.62, 0.02)}, array);
  REQUIRE(res.matches.size() == 1);
  CHECK(res.matches[0].first == 1);
  REQUIRE(res.unmatched_beliefs.size() == 1);
  CHECK(res.unmatched_beliefs[0] == 0);
}

TEST_CASE("match_clusters: 3x3 equals exhaustive permutation minimum") {
  TrackerParams params;
  params.particle_count = 10;
  const Pose2D array(0, 0, 0);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> ua(0.05, kPi - 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> bangles(3), cangles(3);
    for (auto& a : bangles) a = ua(rng);
    for (auto& a : cangles) a = ua(rng);
    std::vector<Belief> beliefs;
    for (int i = 0; i < 3; ++i) {
      auto brng = std::mt19937_64(200 + i);
      Belief b = init_belief(i, cluster(bangles[i], 1e-6), array, params, brng, 0.0);
      for (auto& p : b.particles) {
        p.pos = {400 * std::cos(bangles[i]), 400 * std::sin(bangles[i])};
        p.side = Side::left;
      }
      beliefs.push_back(std::move(b));
    }
    std::vector<AoaCluster> clusters;
    for (double a : cangles) clusters.push_back(cluster(a, 0.01));

    const auto res = match_clusters(beliefs, clusters, array);
    double got = 0.0;
    for (const auto& [bi, ci] : res.matches) {
      got += circ_dist_pi(bangles[bi], cangles[ci]);
    }
    std::vector<int> perm = {0, 1, 2};
    double best = 1e18;
    do {
      double c = 0.0;
      for (int i = 0; i < 3; ++i) c += circ_dist_pi(bangles[i], cangles[perm[i]]);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("update_surfacing: silence, VHF, and acoustic reset") {
  TrackerParams params;  // delta_silent = 60
  Belief b;
  b.particles.push_back({{0, 0}, 1.0, Side::left, 0, 0, false});
  b.last_matched_t = 0.0;

  update_surfacing(b, 59.0, false, params);
  CHECK_FALSE(b.surfaced);
  update_surfacing(b, 61.0, false, params);
  CHECK(b.surfaced);

  b.last_matched_t = 100.0;  // fresh acoustic match
  update_surfacing(b, 105.0, false, params);
  CHECK_FALSE(b.surfaced);

  update_surfacing(b, 105.0, true, params);  // VHF wins regardless
  CHECK(b.surfaced);
}

TEST_CASE("estimate: symmetric bimodal belief ties to left at 0.5") {
  Belief b;
  b.particles.push_back({{100, 100}, 0.5, Side::left, 0, 0, false});
  b.particles.push_back({{100, -100}, 0.5, Side::right, 0, 0, false});
  const auto e = estimate(b);
  CHECK(e.side_confidence == doctest::Approx(0.5));
  CHECK(e.dominant == Side::left);
  CHECK(e.position.y == doctest::Approx(100.0));
}

TEST_CASE("scripted two-pose triangulation resolves side and range") {
  // zero-noise 90-degree maneuver between two observation poses
  TrackerParams params;
  params.particle_count = 2000;
  SeparationParams sep;
  auto rng = std::mt19937_64(11);

  const Vec2 whale{600, 400};
  const Pose2D pose_a(0, 0, 0);
  const Pose2D pose_b(200, -100, kPi / 2);

  const AoaCluster ca = perfect_cluster(pose_a, whale, sep);
  Belief b = init_belief(0, ca, pose_a, params, rng, 0.0);
  for (int i = 0; i < 3; ++i) {
    predict(b, 10.0, params, rng);
    REQUIRE(update(b, ca, pose_a, params, rng) == UpdateOutcome::ok);
  }
  b.last_aoa = ca.mean_rad;
  b.last_amplitude = ca.mean_amplitude;

  const AoaCluster cb = perfect_cluster(pose_b, whale, sep);
  for (int i = 0; i < 3; ++i) {
    predict(b, 10.0, params, rng);
    REQUIRE(update(b, cb, pose_b, params, rng) == UpdateOutcome::ok);
  }
  REQUIRE(reject_side(b, {ca}, {cb}, pose_a, pose_b, params) == UpdateOutcome::ok);

  const auto e = estimate(b);
  CHECK(e.side_confidence >= 0.99);
  CHECK(e.dominant == Side::left);

  const Vec2 oracle = ray_intersection({0, 0}, bearing(pose_a, whale),
                                       {200, -100}, bearing(pose_b, whale));
  CHECK(oracle.x == doctest::Approx(whale.x).epsilon(1e-9));
  CHECK(oracle.y == doctest::Approx(whale.y).epsilon(1e-9));
  // motion-model diffusion over the six predicts dominates the residual
  CHECK(distance(e.position, oracle) < 25.0);
  CHECK(weight_sum(b) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reject_side: identical array pose removes nothing") {
  TrackerParams params;
  SeparationParams sep;
  auto rng = std::mt19937_64(12);
  const Vec2 whale{500, 300};
  const Pose2D array(0, 0, 0);
  const AoaCluster c = perfect_cluster(array, whale, sep);
  Belief b = init_belief(0, c, array, params, rng, 0.0);
  b.last_aoa = c.mean_rad;
  b.last_amplitude = c.mean_amplitude;
  const std::size_t n_before = b.particles.size();
  // both mirror sides fold identically from the same pose, so nothing is cut
  CHECK(reject_side(b, {c}, {c}, array, array, params) == UpdateOutcome::ok);
  CHECK(b.particles.size() == n_before);
}

TEST_CASE("reject_side: 90-degree turn eliminates the mirror side") {
  TrackerParams params;
  params.particle_count = 1000;
  SeparationParams sep;
  auto rng = std::mt19937_64(13);
  const Vec2 whale{600, 400};
  const Pose2D pose_a(0, 0, 0);
  const Pose2D pose_b(0, 0, kPi / 2);  // sharp turn in place

  const AoaCluster ca = perfect_cluster(pose_a, whale, sep);
  Belief b = init_belief(0, ca, pose_a, params, rng, 0.0);
  b.last_aoa = ca.mean_rad;
  b.last_amplitude = ca.mean_amplitude;

  const AoaCluster cb = perfect_cluster(pose_b, whale, sep);
  REQUIRE(reject_side(b, {ca}, {cb}, pose_a, pose_b, params) == UpdateOutcome::ok);
  for (const auto& p : b.particles) CHECK(p.side == Side::left);
}

TEST_CASE("reject_side: amplitude pairing follows the ground-truth cluster") {
  TrackerParams params;
  SeparationParams sep;
  auto rng = std::mt19937_64(14);
  const Pose2D pose_a(0, 0, 0);
  const Pose2D pose_b(0, 0, kPi / 2);
  const Vec2 near_whale{400, 250};   // strong amplitude
  const Vec2 far_whale{-900, 1200};  // weak amplitude

  const AoaCluster ca_near = perfect_cluster(pose_a, near_whale, sep, 2.5);
  const AoaCluster ca_far = perfect_cluster(pose_a, far_whale, sep, 0.6);
  Belief b = init_belief(0, ca_near, pose_a, params, rng, 0.0);
  b.last_aoa = ca_near.mean_rad;
  b.last_amplitude = ca_near.mean_amplitude;

  // post clusters arrive in the opposite order; amplitude pairing must still
  // hook the belief to its own (near, strong) cluster
  const AoaCluster cb_near = perfect_cluster(pose_b, near_whale, sep, 2.4);
  const AoaCluster cb_far = perfect_cluster(pose_b, far_whale, sep, 0.65);
  REQUIRE(reject_side(b, {ca_far, ca_near}, {cb_far, cb_near}, pose_a, pose_b,
                      params) ==
          UpdateOutcome::ok);
  // survivors must be consistent with the near whale, not the far one
  for (const auto& p : b.particles) {
    const double aoa = fold_aoa(bearing(pose_b, p.pos), pose_b.heading);
    CHECK(circ_dist_pi(aoa, cb_near.mean_rad) < deg2rad(1.0));
  }
}

TEST_CASE("reject_side: everything cut signals degeneracy") {
  TrackerParams params;
  SeparationParams sep;
  auto rng = std::mt19937_64(15);
  const Pose2D pose_a(0, 0, 0);
  const AoaCluster ca = perfect_cluster(pose_a, {500, 300}, sep);
  Belief b = init_belief(0, ca, pose_a, params, rng, 0.0);
  b.last_aoa = ca.mean_rad;
  // post cluster pointing somewhere no particle can explain
  const AoaCluster impossible = cluster(ca.mean_rad + 1.2, 1e-4, ca.mean_amplitude);
  CHECK(reject_side(b, {ca}, {impossible}, pose_a, pose_a, params) ==
        UpdateOutcome::degenerate);
}

TEST_CASE("side identifiability: dominant side equals ground truth") {
  // zero noise, two non-collinear poses, several geometries
  TrackerParams params;
  params.particle_count = 600;
  SeparationParams sep;
  std::mt19937_64 geom_rng(16);
  std::uniform_real_distribution<double> ux(300, 900), uy(150, 700);
  for (int trial = 0; trial < 20; ++trial) {
    auto rng = std::mt19937_64(300 + trial);
    const Vec2 whale{ux(geom_rng), uy(geom_rng)};  // left of the +x axis
    const Pose2D pose_a(0, 0, 0);
    const Pose2D pose_b(100, 50, kPi / 3);
    const AoaCluster ca = perfect_cluster(pose_a, whale, sep);
    Belief b = init_belief(0, ca, pose_a, params, rng, 0.0);
    b.last_aoa = ca.mean_rad;
    b.last_amplitude = ca.mean_amplitude;
    const AoaCluster cb = perfect_cluster(pose_b, whale, sep);
    predict(b, 10.0, params, rng);
    REQUIRE(update(b, cb, pose_b, params, rng) == UpdateOutcome::ok);
    REQUIRE(reject_side(b, {ca}, {cb}, pose_a, pose_b, params) == UpdateOutcome::ok);
    CHECK(estimate(b).dominant == Side::left);
  }
}

TEST_CASE("update_world_bearing: unambiguous update kills the mirror side") {
  TrackerParams params;
  params.particle_count = 400;
  SeparationParams sep;
  auto rng = std::mt19937_64(17);
  const Vec2 whale{500, 350};
  const Pose2D array(0, 0, 0);
  const AoaCluster c = perfect_cluster(array, whale, sep);
  Belief b = init_belief(0, c, array, params, rng, 0.0);
  const double world = bearing(Pose2D(0, 0, 0), whale);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(update_world_bearing(b, world, deg2rad(2.0), Pose2D(0, 0, 0), params,
                                 rng) == UpdateOutcome::ok);
  }
  const auto e = estimate(b);
  CHECK(e.dominant == Side::left);
  CHECK(e.side_confidence > 0.95);
}
