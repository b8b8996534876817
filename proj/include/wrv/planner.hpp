#pragma once
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "wrv/dive_model.hpp"
#include "wrv/tracker.hpp"
#include "wrv/world.hpp"

namespace wrv {

enum class UavAction { takeoff, wait, go_home, go_to_belief };

const char* action_name(UavAction a);

/// One concrete hypothesis the rollout simulates: UAV state, a whale
/// position drawn from the tracker belief, and one sampled surface schedule.
struct PlannerParticle {
  double t_s = 0.0;
  Vec2 whale_pos;
  UAVState uav;
  SurfaceSchedule schedule;
  bool rendezvoused = false;
  bool stranded = false;  // flight time hit zero away from home
};

struct PlannerParams {
  int particle_count = 100;       // M
  double stage_cap_s = 120.0;     // delta: per-stage time cap
  double rendezvous_radius_m = 200.0;
  double horizon_s = 5160.0;      // two dive cycles by default
  double horizon_tail_s = 2580.0; // penalty tail past the horizon
  double v_max_mps = 10.0;
  Vec2 home;                      // base station (catamaran)
  double full_flight_s = 900.0;   // battery granted by takeoff

  // Absolute end of the planning window. NaN: derived per rollout as
  // t + horizon_s. choose_action pins it at decision time so candidate
  // actions are costed against the same window.
  double horizon_end_s = std::numeric_limits<double>::quiet_NaN();
};

struct TransitionResult {
  PlannerParticle next;
  double cost_s = 0.0;
};

bool action_admissible(UavAction a, FlightStatus f);

/// One rollout stage. The stage time is the minimum of the action's
/// completion time and the stage cap, never exceeding the remaining flight
/// time; the rendezvous flag is set when the stage ends in flight within the
/// rendezvous radius of a surfaced whale. Throws on inadmissible actions.
TransitionResult transition(const PlannerParticle& p, UavAction u,
                            const PlannerParams& params);

/// In flight: go to the belief while a round trip still fits in the battery,
/// otherwise go home. Grounded: take off when a rendezvous is feasible in the
/// next surfacing (flying at v_max from home at the interval start, with a
/// feasible return leg), otherwise wait.
UavAction base_policy(const PlannerParticle& p, const PlannerParams& params);

using RolloutObserver =
    const std::function<void(const PlannerParticle&, UavAction, double)>*;

/// Accumulated time until rendezvous under the base policy; horizon overrun
/// and stranding pay horizon + tail.
double rollout_cost(const PlannerParticle& p, const PlannerParams& params,
                    RolloutObserver observer = nullptr);

struct ActionChoice {
  UavAction action = UavAction::wait;
  std::vector<std::pair<UavAction, double>> q_values;
};

/// One-step lookahead over the admissible set with base-policy rollouts:
/// argmin_u (1/M) sum_m [ g(b_m, u) + J(F(b_m, u)) ]. Ties break by fixed
/// action order (takeoff before wait, go_to_belief before go_home).
ActionChoice choose_action(const std::vector<PlannerParticle>& particles,
                           FlightStatus flight_status,
                           const PlannerParams& params);

struct DiveAnchor {
  double t_s = 0.0;
  DiveAnchorState state = DiveAnchorState::underwater_since;
};

/// Build M planner particles from a tracker belief: whale positions are
/// weighted-resampled from the dominant side, schedules sampled from the dive
/// model at the given anchor, UAV state copied.
std::vector<PlannerParticle> make_planner_particles(
    const Belief& belief, const UAVState& uav, const DiveModelParams& dive,
    const DiveAnchor& anchor, double now_s, int count, double horizon_s,
    std::mt19937_64& rng);

}  // namespace wrv
