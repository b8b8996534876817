#include "wrv/acoustic.hpp"

#include <stdexcept>

namespace wrv {

std::vector<AOAMeasurement> observe_batch(const std::vector<WhaleSnapshot>& whales,
                                          const Pose2D& array_pose,
                                          const AcousticNoiseParams& params,
                                          double t_s, std::mt19937_64& rng) {
  std::vector<AOAMeasurement> out;
  std::normal_distribution<double> bearing_noise(0.0, deg2rad(params.sigma_deg));
  std::normal_distribution<double> amp_jitter(0.0, 0.05);

  for (const auto& w : whales) {
    if (w.is_surfaced) continue;  // whales stop vocalizing at the surface
    const double d = distance(array_pose.position(), w.position);
    if (d <= 0.0) throw std::runtime_error("observe_batch: degenerate geometry");
    const double true_bearing = bearing(array_pose, w.position);
    const double base_amp = params.amplitude_scale / d;
    for (int c = 0; c < params.clicks_per_batch; ++c) {
      AOAMeasurement m;
      m.t_s = t_s;
      m.aoa = fold_aoa(true_bearing + bearing_noise(rng), array_pose.heading);
      m.amplitude = std::max(1e-12, base_amp * (1.0 + amp_jitter(rng)));
      m.source_id_hidden = w.id;
      out.push_back(m);
    }
  }
  return out;
}

}  // namespace wrv
