#pragma once
#include <vector>

#include "wrv/tracker.hpp"
#include "wrv/world.hpp"

namespace wrv {

struct ManeuverParams {
  double decision_period_s = 300.0;
  std::vector<double> turn_options_deg = {-90.0, 0.0, 90.0};
  double amplitude_threshold = 1000.0 / 1500.0;  // A0/d at ~1.5 km
  bool enable_followup_180 = false;
  double followup_180_delay_s = 60.0;
};

enum class ManeuverKind { hold, turn, head_along_last_aoa };

struct ManeuverDecision {
  ManeuverKind kind = ManeuverKind::hold;
  double turn_deg = 0.0;
  int nearest_belief = -1;
  // (turn option deg, projected distance to the nearest belief)
  std::vector<std::pair<double, double>> option_costs;
};

/// Periodic hold-or-sharp-turn decision. When the nearest belief's last
/// amplitude drops below the threshold the boat heads along the last received
/// AOA direction; otherwise it takes the turn option that minimizes the
/// projected distance to the nearest belief after one decision period.
ManeuverDecision decide_maneuver(const BoatState& boat,
                                 const std::vector<Belief>& beliefs, double t_s,
                                 const ManeuverParams& params);

/// Follow-up rule (off by default): a tracked AOA beyond 90 degrees one
/// minute after a maneuver calls for a 180 degree turn.
bool needs_followup_180(double tracked_aoa_rad);

}  // namespace wrv
