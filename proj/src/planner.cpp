#include "wrv/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wrv {

namespace {

constexpr double kArriveEps_m = 1e-6;
constexpr double kHoverMin_s = 1.0;

bool at_home(const PlannerParticle& p, const PlannerParams& params) {
  return distance(p.uav.pose.position(), params.home) <= kArriveEps_m;
}

void move_towards(UAVState& uav, const Vec2& target, double dist) {
  const Vec2 from = uav.pose.position();
  const double d = distance(from, target);
  if (d <= 1e-12) return;
  const double f = std::min(1.0, dist / d);
  uav.pose.x += (target.x - from.x) * f;
  uav.pose.y += (target.y - from.y) * f;
}

void check_rendezvous(PlannerParticle& p, const PlannerParams& params) {
  if (p.uav.status == FlightStatus::in_flight && !p.stranded &&
      is_surfaced(p.schedule, p.t_s) &&
      distance(p.uav.pose.position(), p.whale_pos) <= params.rendezvous_radius_m) {
    p.rendezvoused = true;
  }
}

}  // namespace

const char* action_name(UavAction a) {
  switch (a) {
    case UavAction::takeoff: return "takeoff";
    case UavAction::wait: return "wait";
    case UavAction::go_home: return "go_home";
    case UavAction::go_to_belief: return "go_to_belief";
  }
  return "?";
}

bool action_admissible(UavAction a, FlightStatus f) {
  if (f == FlightStatus::grounded) {
    return a == UavAction::takeoff || a == UavAction::wait;
  }
  return a == UavAction::go_home || a == UavAction::go_to_belief;
}

TransitionResult transition(const PlannerParticle& p, UavAction u,
                            const PlannerParams& params) {
  if (!action_admissible(u, p.uav.status)) {
    throw std::invalid_argument("transition: action inadmissible for flight status");
  }
  TransitionResult r;
  r.next = p;
  PlannerParticle& q = r.next;
  const double v = params.v_max_mps;
  double dt = 0.0;

  switch (u) {
    case UavAction::wait:
      dt = params.stage_cap_s;
      break;
    case UavAction::takeoff:
      q.uav.status = FlightStatus::in_flight;
      q.uav.pose = Pose2D(params.home.x, params.home.y, q.uav.pose.heading);
      q.uav.remaining_flight_s = params.full_flight_s;
      dt = 0.0;
      break;
    case UavAction::go_home: {
      const double d = distance(q.uav.pose.position(), params.home);
      dt = std::min({params.stage_cap_s, d / v, q.uav.remaining_flight_s});
      move_towards(q.uav, params.home, v * dt);
      q.uav.remaining_flight_s -= dt;
      if (distance(q.uav.pose.position(), params.home) <= kArriveEps_m) {
        q.uav.pose = Pose2D(params.home.x, params.home.y, q.uav.pose.heading);
        q.uav.status = FlightStatus::grounded;
      } else if (q.uav.remaining_flight_s <= 1e-9) {
        q.stranded = true;
      }
      break;
    }
    case UavAction::go_to_belief: {
      const double d = distance(q.uav.pose.position(), q.whale_pos);
      const double ttc = d / v;
      const double rem = q.uav.remaining_flight_s;
      bool travelled = false;
      if (ttc >= kHoverMin_s) {
        // battery failsafe: never fly past the point where home becomes
        // unreachable. Largest dt with rem - dt >= |pos + v dt u - home| / v;
        // the squared form is linear in dt. The boundary case with motion
        // toward home keeps the slack constant and is unconstrained.
        const Vec2 pos = q.uav.pose.position();
        const Vec2 a = pos - params.home;
        const Vec2 dir = (q.whale_pos - pos) * (1.0 / d);
        const double a_dot_b = (a.x * dir.x + a.y * dir.y) * v;
        const double denom = 2.0 * (a_dot_b + v * v * rem);
        const double num = v * v * rem * rem - (a.x * a.x + a.y * a.y);
        double failsafe_dt;
        if (num > 1e-9) {
          failsafe_dt = num / denom;
        } else {
          failsafe_dt = denom <= 1e-9 ? ttc : 0.0;
        }
        dt = std::min({params.stage_cap_s, ttc, rem, failsafe_dt});
        if (dt > 1e-9) {
          move_towards(q.uav, q.whale_pos, v * dt);
          travelled = true;
        }
      }
      if (!travelled) {
        // station-keeping at the failsafe boundary or at the belief: hold
        // until the schedule changes, but never past the go-home slack
        const double t_home = distance(q.uav.pose.position(), params.home) / v;
        const double slack = std::max(0.0, rem - t_home);
        const double boundary = next_boundary_after(q.schedule, q.t_s) - q.t_s;
        dt = std::min({params.stage_cap_s, boundary, slack});
        if (dt <= 1e-12) {
          // cannot hold station: settle on the deck or give the stage back
          if (at_home(q, params) && rem <= 1e-9) {
            q.uav.status = FlightStatus::grounded;
          }
          dt = 0.0;
        }
      }
      q.uav.remaining_flight_s -= dt;
      if (q.uav.remaining_flight_s <= 1e-9 && !at_home(q, params)) {
        q.uav.remaining_flight_s = std::max(0.0, q.uav.remaining_flight_s);
        q.stranded = true;
      }
      break;
    }
  }
  q.uav.remaining_flight_s = std::max(0.0, q.uav.remaining_flight_s);
  q.t_s += dt;
  r.cost_s = dt;
  check_rendezvous(q, params);
  return r;
}

UavAction base_policy(const PlannerParticle& p, const PlannerParams& params) {
  const double v = params.v_max_mps;
  if (p.uav.status == FlightStatus::in_flight) {
    const Vec2 uav = p.uav.pose.position();
    const double d_whale = distance(uav, p.whale_pos);
    const double rem = p.uav.remaining_flight_s;
    // round trip measured to the rendezvous radius and back from the stop
    // point, consistent with the grounded takeoff predicate
    const double reach = std::max(0.0, d_whale - params.rendezvous_radius_m);
    Vec2 stop = uav;
    if (d_whale > 1e-12 && reach > 0.0) {
      stop = uav + (p.whale_pos - uav) * (reach / d_whale);
    }
    const double t_out = reach / v;
    const double t_back = distance(stop, params.home) / v;
    if (rem >= t_out + t_back - 1e-9) {
      if (d_whale / v >= kHoverMin_s) return UavAction::go_to_belief;
      // already at the belief; keep station only with real slack left
      const double t_home = distance(uav, params.home) / v;
      if (rem - t_home >= kHoverMin_s) return UavAction::go_to_belief;
    }
    return UavAction::go_home;
  }

  // grounded: look at the next surface interval (the current one if inside)
  const auto& intervals = p.schedule.intervals;
  double a = 0.0, e = 0.0;
  bool found = false;
  for (const auto& [start, end] : intervals) {
    if (end > p.t_s) {
      a = start;
      e = end;
      found = true;
      break;
    }
  }
  if (!found) return UavAction::wait;
  const double t_out =
      std::max(0.0, distance(params.home, p.whale_pos) - params.rendezvous_radius_m) / v;
  // departing now: fly out, loiter at the whale until the window opens,
  // rendezvous, return
  const double arrival = std::max(a, p.t_s + t_out);
  const double loiter = std::max(0.0, a - (p.t_s + t_out));
  if (arrival < e && params.full_flight_s >= t_out + loiter + t_out) {
    return UavAction::takeoff;
  }
  return UavAction::wait;
}

double rollout_cost(const PlannerParticle& p, const PlannerParams& params,
                    RolloutObserver observer) {
  if (p.rendezvoused) return 0.0;
  const double end = std::isnan(params.horizon_end_s)
                         ? p.t_s + params.horizon_s
                         : params.horizon_end_s;
  double acc = 0.0;
  int zero_streak = 0;
  PlannerParticle cur = p;
  while (true) {
    if (cur.rendezvoused) return acc;
    // stranding pays the accumulated time plus the full window remainder
    // plus the tail, so it strictly dominates any recoverable branch
    if (cur.stranded) return acc + std::max(0.0, end - cur.t_s) +
                             params.horizon_tail_s;
    if (cur.t_s >= end) return acc + params.horizon_tail_s;
    const UavAction u = base_policy(cur, params);
    TransitionResult r = transition(cur, u, params);
    acc += r.cost_s;
    cur = std::move(r.next);
    if (observer != nullptr) (*observer)(cur, u, acc);
    // a policy stuck on zero-duration stages cannot reach a rendezvous
    zero_streak = r.cost_s <= 1e-12 ? zero_streak + 1 : 0;
    if (zero_streak > 4) {
      return acc + std::max(0.0, end - cur.t_s) + params.horizon_tail_s;
    }
  }
}

ActionChoice choose_action(const std::vector<PlannerParticle>& particles,
                           FlightStatus flight_status,
                           const PlannerParams& params) {
  if (particles.empty()) {
    throw std::invalid_argument("choose_action: need at least one particle");
  }
  const std::vector<UavAction> candidates =
      flight_status == FlightStatus::grounded
          ? std::vector<UavAction>{UavAction::takeoff, UavAction::wait}
          : std::vector<UavAction>{UavAction::go_to_belief, UavAction::go_home};

  ActionChoice choice;
  double best_q = std::numeric_limits<double>::infinity();
  for (UavAction u : candidates) {
    double q = 0.0;
    for (const auto& m : particles) {
      TransitionResult r = transition(m, u, params);
      q += r.cost_s + rollout_cost(r.next, params);
    }
    q /= static_cast<double>(particles.size());
    choice.q_values.emplace_back(u, q);
    if (q < best_q) {  // fixed candidate order; strict < keeps the earlier one
      best_q = q;
      choice.action = u;
    }
  }
  return choice;
}

std::vector<PlannerParticle> make_planner_particles(
    const Belief& belief, const UAVState& uav, const DiveModelParams& dive,
    const DiveAnchor& anchor, double now_s, int count, double horizon_s,
    std::mt19937_64& rng) {
  if (belief.particles.empty()) {
    throw std::logic_error("make_planner_particles: degenerate belief");
  }
  const BeliefEstimate est = estimate(belief);

  // dominant-side positions and cumulative weights for resampling
  std::vector<const TrackParticle*> side;
  double mass = 0.0;
  for (const auto& tp : belief.particles) {
    if (tp.side == est.dominant) {
      side.push_back(&tp);
      mass += tp.weight;
    }
  }
  std::vector<double> cum;
  cum.reserve(side.size());
  double c = 0.0;
  for (const auto* tp : side) {
    c += tp->weight / mass;
    cum.push_back(c);
  }

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<PlannerParticle> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    PlannerParticle p;
    p.t_s = now_s;
    p.uav = uav;
    const auto it = std::lower_bound(cum.begin(), cum.end(), u01(rng));
    const std::size_t idx = std::min<std::size_t>(
        side.size() - 1, static_cast<std::size_t>(it - cum.begin()));
    p.whale_pos = side[idx]->pos;
    p.schedule = sample_schedule(dive, anchor.t_s, anchor.state, horizon_s, rng, now_s);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace wrv
