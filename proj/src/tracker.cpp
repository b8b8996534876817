#include "wrv/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wrv/hungarian.hpp"

namespace wrv {

namespace {

constexpr double kDegenerateLogKernel = -18.0;  // exp(-0.5 * 6^2): 6 sigma
constexpr double kHeadingJitterPerSqrtS = 0.05;

void normalize_weights(Belief& b) {
  double s = 0.0;
  for (const auto& p : b.particles) s += p.weight;
  if (s <= 0.0) throw std::logic_error("tracker: zero total weight");
  for (auto& p : b.particles) p.weight /= s;
}

void systematic_resample(Belief& b, std::mt19937_64& rng) {
  const std::size_t n = b.particles.size();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u0 = u01(rng) / static_cast<double>(n);
  std::vector<TrackParticle> out;
  out.reserve(n);
  double cum = b.particles[0].weight;
  std::size_t i = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = u0 + static_cast<double>(k) / static_cast<double>(n);
    while (u > cum && i + 1 < n) {
      ++i;
      cum += b.particles[i].weight;
    }
    out.push_back(b.particles[i]);
    out.back().weight = 1.0 / static_cast<double>(n);
  }
  b.particles = std::move(out);
}

// Reweight by a per-particle log kernel; shared by folded and world-bearing
// updates. Leaves the belief untouched and reports degeneracy when every
// particle is beyond the 6-sigma kernel cut.
UpdateOutcome weighted_update(Belief& belief,
                              const std::vector<double>& log_kernel,
                              const TrackerParams& params,
                              std::mt19937_64& rng) {
  double max_lk = -std::numeric_limits<double>::infinity();
  for (double lk : log_kernel) max_lk = std::max(max_lk, lk);
  if (max_lk < kDegenerateLogKernel) return UpdateOutcome::degenerate;

  double total = 0.0;
  for (std::size_t i = 0; i < belief.particles.size(); ++i) {
    total += belief.particles[i].weight * std::exp(log_kernel[i] - max_lk);
  }
  if (total <= 0.0 || !std::isfinite(total)) return UpdateOutcome::degenerate;

  for (std::size_t i = 0; i < belief.particles.size(); ++i) {
    belief.particles[i].weight *= std::exp(log_kernel[i] - max_lk);
  }
  normalize_weights(belief);

  if (effective_sample_size(belief) <
      params.ess_frac * static_cast<double>(belief.particles.size())) {
    systematic_resample(belief, rng);
  }
  return UpdateOutcome::ok;
}

}  // namespace

std::vector<AoaCluster> summarize_clusters(const GMMFit& fit,
                                           const std::vector<AOAMeasurement>& batch) {
  std::vector<AoaCluster> out(fit.n);
  std::vector<std::vector<int>> id_votes(fit.n);
  for (int j = 0; j < fit.n; ++j) {
    out[j].mean_rad = fit.means[j];
    out[j].sigma_rad = fit.sigmas[j];
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int j = fit.assignments[i];
    out[j].mean_amplitude += batch[i].amplitude;
    out[j].count += 1;
    id_votes[j].push_back(batch[i].source_id_hidden);
  }
  for (int j = 0; j < fit.n; ++j) {
    if (out[j].count > 0) {
      out[j].mean_amplitude /= out[j].count;
      auto& v = id_votes[j];
      std::sort(v.begin(), v.end());
      int best_id = v.front(), best_run = 0, run = 0, prev = v.front() - 1;
      for (int id : v) {
        run = (id == prev) ? run + 1 : 1;
        prev = id;
        if (run > best_run) {
          best_run = run;
          best_id = id;
        }
      }
      out[j].majority_source_hidden = best_id;
    }
  }
  return out;
}

Belief init_belief(int id, const AoaCluster& cluster, const Pose2D& array_pose,
                   const TrackerParams& params, std::mt19937_64& rng, double t_s) {
  if (params.particle_count < 10) {
    throw std::invalid_argument("tracker: particle_count must be >= 10");
  }
  Belief b;
  b.id = id;
  b.birth_t = t_s;
  b.last_matched_t = t_s;
  b.last_aoa = cluster.mean_rad;
  b.last_amplitude = cluster.mean_amplitude;
  b.particles.resize(params.particle_count);

  std::normal_distribution<double> angle(cluster.mean_rad, cluster.sigma_rad);
  std::uniform_real_distribution<double> range(0.0, params.init_range_max_m);
  const int half = params.particle_count / 2;
  for (int i = 0; i < params.particle_count; ++i) {
    const bool left = i < half;
    const double a = angle(rng);
    const double world = left ? array_pose.heading + a : array_pose.heading - a;
    const double r = range(rng);
    auto& p = b.particles[i];
    p.pos = {array_pose.x + r * std::cos(world),
             array_pose.y + r * std::sin(world)};
    p.weight = 1.0 / params.particle_count;
    p.side = left ? Side::left : Side::right;
  }
  return b;
}

void predict(Belief& belief, double dt, const TrackerParams& params,
             std::mt19937_64& rng) {
  if (dt <= 0.0) throw std::invalid_argument("predict: dt must be positive");
  std::uniform_real_distribution<double> speed(0.0, params.motion_speed_max_mps);
  std::uniform_real_distribution<double> heading(0.0, kTwoPi);
  std::normal_distribution<double> jitter(0.0, kHeadingJitterPerSqrtS * std::sqrt(dt));
  for (auto& p : belief.particles) {
    if (!p.motion_init) {
      p.motion_speed = params.motion_speed_max_mps > 0.0 ? speed(rng) : 0.0;
      p.motion_heading = heading(rng);
      p.motion_init = true;
    } else {
      p.motion_heading = wrap_2pi(p.motion_heading + jitter(rng));
    }
    p.pos.x += p.motion_speed * dt * std::cos(p.motion_heading);
    p.pos.y += p.motion_speed * dt * std::sin(p.motion_heading);
  }
}

UpdateOutcome update(Belief& belief, const AoaCluster& cluster,
                     const Pose2D& array_pose, const TrackerParams& params,
                     std::mt19937_64& rng) {
  if (cluster.sigma_rad <= 0.0) {
    throw std::invalid_argument("update: cluster sigma must be positive");
  }
  std::vector<double> log_kernel(belief.particles.size());
  for (std::size_t i = 0; i < belief.particles.size(); ++i) {
    const double aoa = fold_aoa(bearing(array_pose, belief.particles[i].pos),
                                array_pose.heading);
    const double r = circ_dist_pi(aoa, cluster.mean_rad) / cluster.sigma_rad;
    log_kernel[i] = -0.5 * r * r;
  }
  return weighted_update(belief, log_kernel, params, rng);
}

UpdateOutcome update_world_bearing(Belief& belief, double bearing_rad,
                                   double sigma_rad, const Pose2D& origin,
                                   const TrackerParams& params,
                                   std::mt19937_64& rng) {
  if (sigma_rad <= 0.0) {
    throw std::invalid_argument("update_world_bearing: sigma must be positive");
  }
  std::vector<double> log_kernel(belief.particles.size());
  for (std::size_t i = 0; i < belief.particles.size(); ++i) {
    const double b = bearing(origin, belief.particles[i].pos);
    const double r = circ_dist_2pi(b, bearing_rad) / sigma_rad;
    log_kernel[i] = -0.5 * r * r;
  }
  return weighted_update(belief, log_kernel, params, rng);
}

void reinit_on_degeneracy(Belief& belief, const AoaCluster& last_cluster,
                          const Pose2D& array_pose, const TrackerParams& params,
                          std::mt19937_64& rng, double t_s) {
  Belief fresh = init_belief(belief.id, last_cluster, array_pose, params, rng, t_s);
  fresh.surfaced = belief.surfaced;
  fresh.birth_t = belief.birth_t;
  fresh.reinit_count = belief.reinit_count + 1;
  fresh.last_matched_t = belief.last_matched_t;
  belief = std::move(fresh);
}

MatchResult match_clusters(const std::vector<Belief>& beliefs,
                           const std::vector<AoaCluster>& clusters,
                           const Pose2D& array_pose) {
  MatchResult res;
  if (beliefs.empty()) {
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      res.unmatched_clusters.push_back(static_cast<int>(j));
    }
    return res;
  }
  if (clusters.empty()) {
    for (std::size_t i = 0; i < beliefs.size(); ++i) {
      res.unmatched_beliefs.push_back(static_cast<int>(i));
    }
    return res;
  }

  std::vector<std::vector<double>> cost(
      beliefs.size(), std::vector<double>(clusters.size(), 0.0));
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    // predicted folded AOA of each side's centroid
    double mass[2] = {0.0, 0.0};
    Vec2 centroid[2] = {{0, 0}, {0, 0}};
    for (const auto& p : beliefs[i].particles) {
      const int s = p.side == Side::left ? 0 : 1;
      mass[s] += p.weight;
      centroid[s] = centroid[s] + p.pos * p.weight;
    }
    double side_aoa[2];
    bool side_ok[2] = {false, false};
    for (int s = 0; s < 2; ++s) {
      if (mass[s] > 0.0) {
        const Vec2 c = centroid[s] * (1.0 / mass[s]);
        side_aoa[s] = fold_aoa(bearing(array_pose, c), array_pose.heading);
        side_ok[s] = true;
      }
    }
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (int s = 0; s < 2; ++s) {
        if (!side_ok[s]) continue;
        best = std::min(best, circ_dist_pi(side_aoa[s], clusters[j].mean_rad));
      }
      cost[i][j] = best;
    }
  }

  const std::vector<int> row_to_col = solve_assignment(cost);
  std::vector<char> cluster_used(clusters.size(), false);
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    if (row_to_col[i] >= 0) {
      res.matches.emplace_back(static_cast<int>(i), row_to_col[i]);
      cluster_used[row_to_col[i]] = true;
    } else {
      res.unmatched_beliefs.push_back(static_cast<int>(i));
    }
  }
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    if (!cluster_used[j]) res.unmatched_clusters.push_back(static_cast<int>(j));
  }
  return res;
}

void update_surfacing(Belief& belief, double t_s, bool vhf_matched,
                      const TrackerParams& params) {
  belief.surfaced =
      (t_s - belief.last_matched_t >= params.delta_silent_s) || vhf_matched;
}

double normal_band_quantile(double q) {
  q = std::clamp(q, 0.0, 1.0 - 1e-12);
  // solve erf(z / sqrt(2)) = q by bisection
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erf(mid / std::sqrt(2.0)) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

UpdateOutcome reject_side(Belief& belief, const std::vector<AoaCluster>& pre,
                          const std::vector<AoaCluster>& post,
                          const Pose2D& array_pose_before,
                          const Pose2D& array_pose_after,
                          const TrackerParams& params) {
  if (pre.empty() || post.empty()) return UpdateOutcome::ok;

  // the belief's own pre-maneuver cluster: nearest to its last matched AOA
  std::size_t pre_i = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pre.size(); ++j) {
    const double d = circ_dist_pi(pre[j].mean_rad, belief.last_aoa);
    if (d < best) {
      best = d;
      pre_i = j;
    }
  }
  // pair pre/post by nearest mean amplitude
  std::size_t post_i = 0;
  best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < post.size(); ++j) {
    const double d = std::fabs(post[j].mean_amplitude - pre[pre_i].mean_amplitude);
    if (d < best) {
      best = d;
      post_i = j;
    }
  }

  const double z = normal_band_quantile(params.amp_reject_quantile);
  const double scale =
      std::max({pre[pre_i].sigma_rad, post[post_i].sigma_rad, 1e-6});
  const double band = z * scale;

  std::vector<TrackParticle> kept;
  kept.reserve(belief.particles.size());
  for (const auto& p : belief.particles) {
    const double r_pre =
        circ_dist_pi(fold_aoa(bearing(array_pose_before, p.pos),
                              array_pose_before.heading),
                     pre[pre_i].mean_rad);
    const double r_post =
        circ_dist_pi(fold_aoa(bearing(array_pose_after, p.pos),
                              array_pose_after.heading),
                     post[post_i].mean_rad);
    if (r_post - r_pre <= band) kept.push_back(p);
  }
  if (kept.empty()) return UpdateOutcome::degenerate;
  belief.particles = std::move(kept);
  normalize_weights(belief);
  return UpdateOutcome::ok;
}

BeliefEstimate estimate(const Belief& belief) {
  if (belief.particles.empty()) {
    throw std::logic_error("estimate: degenerate belief (no particles)");
  }
  double mass[2] = {0.0, 0.0};
  Vec2 mean[2] = {{0, 0}, {0, 0}};
  for (const auto& p : belief.particles) {
    const int s = p.side == Side::left ? 0 : 1;
    mass[s] += p.weight;
    mean[s] = mean[s] + p.pos * p.weight;
  }
  const int dom = mass[0] >= mass[1] ? 0 : 1;  // tie-break to left
  BeliefEstimate e;
  e.dominant = dom == 0 ? Side::left : Side::right;
  e.side_confidence = mass[dom];
  e.position = mean[dom] * (1.0 / mass[dom]);
  return e;
}

double effective_sample_size(const Belief& belief) {
  double s2 = 0.0;
  for (const auto& p : belief.particles) s2 += p.weight * p.weight;
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

}  // namespace wrv
