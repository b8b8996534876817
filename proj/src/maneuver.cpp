#include "wrv/maneuver.hpp"

#include <cmath>
#include <limits>

namespace wrv {

ManeuverDecision decide_maneuver(const BoatState& boat,
                                 const std::vector<Belief>& beliefs, double t_s,
                                 const ManeuverParams& params) {
  (void)t_s;
  ManeuverDecision d;

  int nearest = -1;
  double nearest_dist = std::numeric_limits<double>::infinity();
  Vec2 target;
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    if (beliefs[i].particles.empty()) continue;
    const BeliefEstimate e = estimate(beliefs[i]);
    const double dist = distance(boat.pose.position(), e.position);
    if (dist < nearest_dist) {
      nearest_dist = dist;
      nearest = static_cast<int>(i);
      target = e.position;
    }
  }
  if (nearest < 0) {
    d.kind = ManeuverKind::hold;
    return d;
  }
  d.nearest_belief = nearest;

  if (beliefs[nearest].last_amplitude < params.amplitude_threshold) {
    d.kind = ManeuverKind::head_along_last_aoa;
    return d;
  }

  double best_cost = std::numeric_limits<double>::infinity();
  double best_turn = 0.0;
  for (double opt : params.turn_options_deg) {
    const double h = wrap_2pi(boat.pose.heading + deg2rad(opt));
    const double travel = boat.speed_mps * params.decision_period_s;
    const Vec2 projected{boat.pose.x + travel * std::cos(h),
                         boat.pose.y + travel * std::sin(h)};
    const double cost = distance(projected, target);
    d.option_costs.emplace_back(opt, cost);
    if (cost < best_cost) {
      best_cost = cost;
      best_turn = opt;
    }
  }
  d.kind = ManeuverKind::turn;
  d.turn_deg = best_turn;
  return d;
}

bool needs_followup_180(double tracked_aoa_rad) {
  return tracked_aoa_rad > kPi / 2.0;
}

}  // namespace wrv
