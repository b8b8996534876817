#pragma once
#include <random>
#include <vector>

#include "wrv/acoustic.hpp"
#include "wrv/gmm.hpp"
#include "wrv/world.hpp"

namespace wrv {

/// One AOA cluster as consumed by the tracker: GMM component plus the mean
/// amplitude of its member measurements.
struct AoaCluster {
  double mean_rad = 0.0;
  double sigma_rad = 0.0;
  double mean_amplitude = 0.0;
  int count = 0;
  int majority_source_hidden = -1;  // simulation bookkeeping only
};

std::vector<AoaCluster> summarize_clusters(const GMMFit& fit,
                                           const std::vector<AOAMeasurement>& batch);

enum class Side { left, right };

struct TrackParticle {
  Vec2 pos;
  double weight = 0.0;
  Side side = Side::left;  // side of the array axis at initialization
  double motion_heading = 0.0;
  double motion_speed = 0.0;
  bool motion_init = false;
};

/// Bimodal particle belief over one whale group's location.
struct Belief {
  int id = -1;
  std::vector<TrackParticle> particles;
  bool surfaced = false;
  double last_matched_t = 0.0;
  double last_aoa = 0.0;
  double last_amplitude = 0.0;
  int reinit_count = 0;
  double birth_t = 0.0;
};

struct TrackerParams {
  int particle_count = 500;
  double init_range_max_m = 1000.0;
  double motion_speed_max_mps = 2.5;
  double delta_silent_s = 60.0;   // silence before the group is called surfaced
  double ess_frac = 0.5;          // resample when ESS < ess_frac * P
  double amp_reject_quantile = 0.95;
};

enum class UpdateOutcome { ok, degenerate };

/// Initialize a belief from one AOA cluster: particles split evenly across
/// the two unfolded world bearings {heading + a, heading - a}, angle drawn
/// from the cluster Gaussian, range uniform on (0, init_range_max].
Belief init_belief(int id, const AoaCluster& cluster, const Pose2D& array_pose,
                   const TrackerParams& params, std::mt19937_64& rng, double t_s);

/// Random-walk-with-heading motion: per-particle speed U(0, max) and heading
/// U(0, 2pi), persisted with small heading jitter. Weights untouched.
void predict(Belief& belief, double dt, const TrackerParams& params,
             std::mt19937_64& rng);

/// Reweight by the folded-AOA likelihood of the cluster and resample when the
/// effective sample size collapses. Returns degenerate (belief untouched)
/// when every particle sits beyond 6 sigma of the cluster.
UpdateOutcome update(Belief& belief, const AoaCluster& cluster,
                     const Pose2D& array_pose, const TrackerParams& params,
                     std::mt19937_64& rng);

/// Unambiguous world-bearing update (VHF AOA fusion); no fold involved.
UpdateOutcome update_world_bearing(Belief& belief, double bearing_rad,
                                   double sigma_rad, const Pose2D& origin,
                                   const TrackerParams& params,
                                   std::mt19937_64& rng);

/// Fresh bimodal initialization from the most recent cluster. Keeps id,
/// surfaced flag and birth time; bumps the reinit counter.
void reinit_on_degeneracy(Belief& belief, const AoaCluster& last_cluster,
                          const Pose2D& array_pose, const TrackerParams& params,
                          std::mt19937_64& rng, double t_s);

struct MatchResult {
  std::vector<std::pair<int, int>> matches;  // (belief index, cluster index)
  std::vector<int> unmatched_beliefs;
  std::vector<int> unmatched_clusters;
};

/// Hungarian assignment between beliefs and clusters. The cost of a pair is
/// the minimum over belief sides of the circular distance between the side's
/// predicted folded AOA and the cluster mean.
MatchResult match_clusters(const std::vector<Belief>& beliefs,
                           const std::vector<AoaCluster>& clusters,
                           const Pose2D& array_pose);

/// surfaced := silent for delta_silent seconds, or a VHF AOA matched.
void update_surfacing(Belief& belief, double t_s, bool vhf_matched,
                      const TrackerParams& params);

/// Post-maneuver side rejection. Pre/post cluster sets are paired by nearest
/// mean amplitude; a particle is removed when its sigma-scaled residual
/// against the paired post cluster grew across the maneuver by more than the
/// two-sided normal quantile at amp_reject_quantile. Mirror-side particles
/// diverge sharply after a turn while true-side particles keep their
/// residual, so an unchanged array pose removes nothing. Returns degenerate
/// when nothing survives.
UpdateOutcome reject_side(Belief& belief, const std::vector<AoaCluster>& pre,
                          const std::vector<AoaCluster>& post,
                          const Pose2D& array_pose_before,
                          const Pose2D& array_pose_after,
                          const TrackerParams& params);

struct BeliefEstimate {
  Vec2 position;
  double side_confidence = 0.0;
  Side dominant = Side::left;
};

/// Weighted mean of the dominant side; ties break to left.
BeliefEstimate estimate(const Belief& belief);

double effective_sample_size(const Belief& belief);

/// Two-sided standard normal quantile: z with P(|Z| <= z) = q.
double normal_band_quantile(double q);

}  // namespace wrv
