#pragma once
#include <random>
#include <vector>

#include "wrv/world.hpp"

namespace wrv {

/// One folded acoustic bearing. source_id_hidden carries the ground-truth
/// group id for simulation bookkeeping only; estimators never read it.
struct AOAMeasurement {
  double t_s = 0.0;
  double aoa = 0.0;        // radians, [0, pi), relative to the array axis
  double amplitude = 0.0;  // dimensionless, > 0
  int source_id_hidden = -1;
};

struct AcousticNoiseParams {
  double sigma_deg = 5.0;      // std of zero-mean Gaussian bearing noise
  int clicks_per_batch = 20;   // per vocalizing group per 10 s batch
  double amplitude_scale = 1000.0;  // A0 in the A0/d amplitude law
};

struct WhaleSnapshot {
  Vec2 position;
  bool is_surfaced = false;
  int id = -1;
};

/// Synthesize one 10 s batch of folded AOA measurements. Diving whales emit
/// clicks_per_batch clicks each; surfaced whales are silent. Gaussian noise
/// is applied to the true world bearing before folding, and amplitude follows
/// A0/d with 5% multiplicative jitter.
std::vector<AOAMeasurement> observe_batch(const std::vector<WhaleSnapshot>& whales,
                                          const Pose2D& array_pose,
                                          const AcousticNoiseParams& params,
                                          double t_s, std::mt19937_64& rng);

}  // namespace wrv
