#include "wrv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wrv/planner.hpp"
#include "wrv/rng.hpp"

namespace wrv {

namespace {

using nlohmann::json;

constexpr double kSideResolved = 0.99;

struct BeliefMeta {
  int provenance = -1;  // majority ground-truth id of the last matched cluster
  DiveAnchor anchor;
};

enum class UavCommand { none, fly_to_belief, fly_home };

double round6(double v) { return std::round(v * 1e6) / 1e6; }

class Engine {
 public:
  Engine(const Scenario& sc, std::ostream* trace)
      : sc_(sc),
        trace_(trace),
        rng_truth_(make_rng(sc.seed, "truth")),
        rng_acoustic_(make_rng(sc.seed, "acoustic")),
        rng_gmm_(make_rng(sc.seed, "gmm")),
        rng_tracker_(make_rng(sc.seed, "tracker")),
        rng_planner_(make_rng(sc.seed, "planner")),
        rng_vhf_(make_rng(sc.seed, "vhf")) {}

  Metrics run() {
    build_truth();
    boat_.pose = Pose2D(sc_.boat.x, sc_.boat.y, deg2rad(sc_.boat.heading_deg));
    boat_.speed_mps = sc_.boat.speed_mps;
    boat_.array_offset_m = sc_.boat.array_offset_m;
    uav_.pose = boat_.pose;
    uav_.max_speed_mps = sc_.uav.max_speed_mps;
    uav_.remaining_flight_s = 0.0;
    uav_.status = FlightStatus::grounded;

    double duration = sc_.duration_s;
    if (duration <= 0.0) {
      for (const auto& w : truth_) duration = std::max(duration, w.duration_s());
    }
    const long n_ticks = static_cast<long>(std::ceil(duration / sc_.tick_s));

    init_surfacing_metrics();

    for (long tick = 0; tick <= n_ticks; ++tick) {
      const double t = tick * sc_.tick_s;
      bool planner_due = false;

      if (is_multiple(t, sc_.batch_period_s)) {
        planner_due = sensing_step(t);
      }
      if (t > 0.0 && is_multiple(t, sc_.maneuver.decision_period_s)) {
        maneuver_step(t);
      }
      if (followup_due_t_ >= 0.0 && t >= followup_due_t_) {
        followup_step(t);
      }
      if (planner_due) planner_step(t);
      kinematics_step(t);
      metrics_step(t);
    }
    finalize_attempt(duration);
    emit_final(duration);
    return metrics_;
  }

 private:
  static bool is_multiple(double t, double period) {
    const double r = std::fmod(t, period);
    return r < 1e-9 || period - r < 1e-9;
  }

  void emit(double t, const char* kind, json payload) {
    if (!trace_) return;
    json e;
    e["t"] = round6(t);
    e["kind"] = kind;
    e["payload"] = std::move(payload);
    (*trace_) << e.dump() << "\n";
  }

  void build_truth() {
    for (std::size_t i = 0; i < sc_.whales.size(); ++i) {
      const auto& wc = sc_.whales[i];
      if (wc.source == "csv") {
        auto loaded = load_trajectory(wc.path);
        for (auto& w : loaded) {
          w.tagged = wc.tagged;
          truth_.push_back(std::move(w));
        }
      } else {
        WhaleTruth w = synth_trajectory(static_cast<int>(i), wc.synth, sc_.dive,
                                        rng_truth_);
        w.tagged = wc.tagged;
        truth_.push_back(std::move(w));
      }
    }
  }

  void init_surfacing_metrics() {
    for (const auto& w : truth_) {
      for (std::size_t k = 0; k < w.surface_intervals.size(); ++k) {
        SurfacingMetric m;
        m.whale_id = w.id;
        m.index = static_cast<int>(k);
        m.min_error_m = std::numeric_limits<double>::infinity();
        metrics_.surfacings.push_back(m);
      }
    }
  }

  // ---- sensing, separation, tracking ----
  bool sensing_step(double t) {
    std::vector<WhaleSnapshot> snaps;
    for (const auto& w : truth_) {
      if (t > w.duration_s()) continue;
      snaps.push_back({w.position(t), w.surfaced(t), w.id});
    }
    const Pose2D array = array_pose(boat_);
    const auto batch = observe_batch(snaps, array, sc_.acoustic, t, rng_acoustic_);

    if (t > 0.0) {
      for (auto& b : beliefs_) predict(b, sc_.batch_period_s, sc_.tracker, rng_tracker_);
    }

    std::vector<AoaCluster> clusters;
    if (!batch.empty()) {
      std::vector<double> points;
      points.reserve(batch.size());
      for (const auto& m : batch) points.push_back(m.aoa);
      const GMMFit fit = select_model(points, sc_.separation, rng_gmm_);
      clusters = summarize_clusters(fit, batch);
      json cj = json::array();
      for (const auto& c : clusters) {
        cj.push_back({{"mean_deg", round6(rad2deg(c.mean_rad))},
                      {"sigma_deg", round6(rad2deg(c.sigma_rad))},
                      {"amp", round6(c.mean_amplitude)},
                      {"count", c.count}});
      }
      emit(t, "clusters", {{"n", clusters.size()}, {"items", cj}});
    }

    const MatchResult match = match_clusters(beliefs_, clusters, array);
    for (const auto& [bi, ci] : match.matches) {
      auto& b = beliefs_[bi];
      const auto outcome = update(b, clusters[ci], array, sc_.tracker, rng_tracker_);
      if (outcome == UpdateOutcome::degenerate) {
        reinit_on_degeneracy(b, clusters[ci], array, sc_.tracker, rng_tracker_, t);
        ++metrics_.reinit_count;
        emit(t, "reinit", {{"belief", b.id}});
      }
      b.last_matched_t = t;
      b.last_aoa = clusters[ci].mean_rad;
      b.last_amplitude = clusters[ci].mean_amplitude;
      meta_[b.id].provenance = clusters[ci].majority_source_hidden;
    }
    for (int ci : match.unmatched_clusters) {
      if (static_cast<int>(beliefs_.size()) >= sc_.separation.k) break;
      Belief b = init_belief(next_belief_id_++, clusters[ci], array, sc_.tracker,
                             rng_tracker_, t);
      meta_[b.id].provenance = clusters[ci].majority_source_hidden;
      meta_[b.id].anchor = {t, DiveAnchorState::underwater_since};
      emit(t, "belief_spawn", {{"belief", b.id}});
      beliefs_.push_back(std::move(b));
    }

    // VHF cue + AOA for tagged, truly surfaced whales
    std::map<int, bool> vhf_matched;
    if (sc_.vhf.enabled) {
      for (const auto& w : truth_) {
        if (!w.tagged || t > w.duration_s() || !w.surfaced(t)) continue;
        const double true_bearing = bearing(boat_.pose, w.position(t));
        std::normal_distribution<double> noise(0.0, deg2rad(sc_.vhf.sigma_deg));
        const double meas = wrap_2pi(true_bearing + noise(rng_vhf_));
        int best = -1;
        double best_d = sc_.vhf.match_gate_m;
        const Vec2 ray_dir{std::cos(meas), std::sin(meas)};
        for (std::size_t bi = 0; bi < beliefs_.size(); ++bi) {
          if (beliefs_[bi].particles.empty()) continue;
          // gate on the closer of the two side candidates: an unresolved
          // belief may be dominated by the mirror side
          double mass[2] = {0.0, 0.0};
          Vec2 centroid[2] = {{0, 0}, {0, 0}};
          for (const auto& p : beliefs_[bi].particles) {
            const int s = p.side == Side::left ? 0 : 1;
            mass[s] += p.weight;
            centroid[s] = centroid[s] + p.pos * p.weight;
          }
          double d = std::numeric_limits<double>::infinity();
          for (int s = 0; s < 2; ++s) {
            if (mass[s] <= 0.0) continue;
            const Vec2 c = centroid[s] * (1.0 / mass[s]);
            // distance from the side centroid to the measurement ray
            const Vec2 rel = c - boat_.pose.position();
            const double along = rel.x * ray_dir.x + rel.y * ray_dir.y;
            const double d_ray = along > 0.0
                                     ? std::fabs(rel.x * ray_dir.y - rel.y * ray_dir.x)
                                     : rel.norm();
            d = std::min(d, d_ray);
          }
          if (d <= best_d) {
            best_d = d;
            best = static_cast<int>(bi);
          }
        }
        if (best >= 0) {
          auto& b = beliefs_[best];
          vhf_matched[b.id] = true;
          const auto outcome =
              update_world_bearing(b, meas, deg2rad(sc_.vhf.sigma_deg),
                                   boat_.pose, sc_.tracker, rng_tracker_);
          emit(t, "vhf_aoa",
               {{"belief", b.id},
                {"bearing_deg", round6(rad2deg(meas))},
                {"accepted", outcome == UpdateOutcome::ok}});
        }
      }
    }

    bool status_changed = false;
    for (auto& b : beliefs_) {
      const bool was = b.surfaced;
      update_surfacing(b, t, vhf_matched.count(b.id) > 0, sc_.tracker);
      if (b.surfaced != was) {
        status_changed = true;
        meta_[b.id].anchor =
            b.surfaced ? DiveAnchor{t, DiveAnchorState::surfaced_since}
                       : DiveAnchor{t, DiveAnchorState::underwater_since};
        emit(t, "surfacing_status", {{"belief", b.id}, {"surfaced", b.surfaced}});
      }
    }

    // post-maneuver side rejection once fresh clusters exist
    if (reject_pending_ && !clusters.empty() && !pre_clusters_.empty()) {
      for (auto& b : beliefs_) {
        if (b.particles.empty()) continue;
        const auto outcome = reject_side(b, pre_clusters_, clusters,
                                         pre_array_pose_, array, sc_.tracker);
        if (outcome == UpdateOutcome::degenerate) {
          // re-seed from the nearest post cluster by amplitude
          std::size_t best = 0;
          double bd = std::numeric_limits<double>::infinity();
          for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
            const double d = std::fabs(clusters[ci].mean_amplitude - b.last_amplitude);
            if (d < bd) {
              bd = d;
              best = ci;
            }
          }
          reinit_on_degeneracy(b, clusters[best], array, sc_.tracker, rng_tracker_, t);
          ++metrics_.reinit_count;
          emit(t, "reinit", {{"belief", b.id}, {"after", "reject_side"}});
        }
      }
      reject_pending_ = false;
    }
    if (!clusters.empty()) {
      last_clusters_ = clusters;
      last_batch_array_pose_ = array;
    }

    for (const auto& b : beliefs_) {
      if (b.particles.empty()) continue;
      const auto est = estimate(b);
      emit(t, "belief",
           {{"id", b.id},
            {"x", round6(est.position.x)},
            {"y", round6(est.position.y)},
            {"side_confidence", round6(est.side_confidence)},
            {"surfaced", b.surfaced},
            {"ess", round6(effective_sample_size(b))},
            {"reinit_count", b.reinit_count}});
      if (metrics_.side_resolution_time_s < 0.0 &&
          est.side_confidence >= kSideResolved) {
        metrics_.side_resolution_time_s = t - b.birth_t;
      }
    }
    return true;  // planner runs on every batch tick (and on status change)
  }

  // ---- boat maneuvering ----
  void maneuver_step(double t) {
    const ManeuverDecision d = decide_maneuver(boat_, beliefs_, t, sc_.maneuver);
    json costs = json::array();
    for (const auto& [opt, cost] : d.option_costs) {
      costs.push_back({{"turn_deg", opt}, {"cost_m", round6(cost)}});
    }
    const double old_heading = boat_.pose.heading;
    switch (d.kind) {
      case ManeuverKind::hold:
        break;
      case ManeuverKind::turn:
        boat_.pose =
            Pose2D(boat_.pose.x, boat_.pose.y, boat_.pose.heading + deg2rad(d.turn_deg));
        break;
      case ManeuverKind::head_along_last_aoa: {
        const auto& b = beliefs_[d.nearest_belief];
        const auto est = estimate(b);
        const double plus = wrap_2pi(boat_.pose.heading + b.last_aoa);
        const double minus = wrap_2pi(boat_.pose.heading - b.last_aoa);
        const double toward = bearing(boat_.pose, est.position);
        const double chosen = circ_dist_2pi(plus, toward) <= circ_dist_2pi(minus, toward)
                                  ? plus
                                  : minus;
        boat_.pose = Pose2D(boat_.pose.x, boat_.pose.y, chosen);
        break;
      }
    }
    if (circ_dist_2pi(old_heading, boat_.pose.heading) > 1e-9) {
      reject_pending_ = true;
      pre_clusters_ = last_clusters_;
      pre_array_pose_ = last_batch_array_pose_;
      if (sc_.maneuver.enable_followup_180) {
        followup_due_t_ = t + sc_.maneuver.followup_180_delay_s;
      }
    }
    emit(t, "maneuver",
         {{"kind", d.kind == ManeuverKind::hold
                       ? "hold"
                       : d.kind == ManeuverKind::turn ? "turn" : "head_along_last_aoa"},
          {"turn_deg", d.turn_deg},
          {"nearest_belief", d.nearest_belief},
          {"costs", costs}});
  }

  void followup_step(double t) {
    followup_due_t_ = -1.0;
    if (beliefs_.empty()) return;
    const ManeuverDecision d = decide_maneuver(boat_, beliefs_, t, sc_.maneuver);
    if (d.nearest_belief < 0) return;
    if (needs_followup_180(beliefs_[d.nearest_belief].last_aoa)) {
      boat_.pose = Pose2D(boat_.pose.x, boat_.pose.y, boat_.pose.heading + kPi);
      reject_pending_ = true;
      pre_clusters_ = last_clusters_;
      pre_array_pose_ = last_batch_array_pose_;
      emit(t, "maneuver", {{"kind", "followup_180"}});
    }
  }

  // ---- UAV planning ----
  int pick_target(double t) const {
    (void)t;
    // closest surfaced belief, skipping ones already visited this flight
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    const Vec2 from = uav_.status == FlightStatus::in_flight
                          ? uav_.pose.position()
                          : boat_.pose.position();
    for (std::size_t i = 0; i < beliefs_.size(); ++i) {
      const auto& b = beliefs_[i];
      if (!b.surfaced || b.particles.empty()) continue;
      if (visited_.count(b.id)) continue;
      const double d = distance(from, estimate(b).position);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0) return best;
    // otherwise: nearest belief at all (planning against its dive schedule)
    for (std::size_t i = 0; i < beliefs_.size(); ++i) {
      const auto& b = beliefs_[i];
      if (b.particles.empty()) continue;
      const double d = distance(from, estimate(b).position);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  void planner_step(double t) {
    if (arrival_wait_until_ > t) return;  // loitering at a reached candidate
    const int ti = pick_target(t);
    if (ti < 0) return;
    const Belief& target = beliefs_[ti];

    PlannerParams pp;
    pp.particle_count = sc_.planner.particle_count;
    pp.stage_cap_s = sc_.planner.stage_cap_s;
    pp.rendezvous_radius_m = sc_.planner.rendezvous_radius_m;
    pp.horizon_s = sc_.planner_horizon_s();
    pp.horizon_tail_s = sc_.planner_tail_s();
    pp.v_max_mps = sc_.uav.max_speed_mps;
    pp.home = boat_.pose.position();
    pp.full_flight_s = sc_.uav.flight_budget_s;

    const DiveAnchor anchor = meta_.count(target.id)
                                  ? meta_.at(target.id).anchor
                                  : DiveAnchor{target.birth_t,
                                               DiveAnchorState::underwater_since};
    const auto particles = make_planner_particles(
        target, uav_, sc_.dive, anchor, t, sc_.planner.particle_count,
        pp.horizon_s, rng_planner_);
    const ActionChoice choice = choose_action(particles, uav_.status, pp);

    json q = json::array();
    for (const auto& [a, v] : choice.q_values) {
      q.push_back({{"action", action_name(a)}, {"q_s", round6(v)}});
    }
    emit(t, "planner",
         {{"action", action_name(choice.action)},
          {"target_belief", target.id},
          {"q_values", q},
          {"particles", sc_.planner.particle_count}});

    if (failsafe_engaged_) return;  // RTL latched: ignore new commands till landed
    switch (choice.action) {
      case UavAction::takeoff:
        if (uav_.status == FlightStatus::grounded && sc_.uav.flight_budget_s > 0.0) {
          uav_.status = FlightStatus::in_flight;
          uav_.remaining_flight_s = sc_.uav.flight_budget_s;
          uav_.pose = boat_.pose;
          command_ = UavCommand::fly_to_belief;
          target_belief_ = target.id;
          visited_.clear();
          AttemptMetric a;
          a.takeoff_t_s = t;
          metrics_.attempts.push_back(a);
          emit(t, "takeoff", {{"budget_s", sc_.uav.flight_budget_s}});
        }
        break;
      case UavAction::wait:
        if (uav_.status == FlightStatus::grounded) command_ = UavCommand::none;
        break;
      case UavAction::go_to_belief:
        if (uav_.status == FlightStatus::in_flight) {
          command_ = UavCommand::fly_to_belief;
          target_belief_ = target.id;
        }
        break;
      case UavAction::go_home:
        if (uav_.status == FlightStatus::in_flight) command_ = UavCommand::fly_home;
        break;
    }
  }

  const Belief* belief_by_id(int id) const {
    for (const auto& b : beliefs_) {
      if (b.id == id) return &b;
    }
    return nullptr;
  }

  // ---- per-tick kinematics ----
  void kinematics_step(double t) {
    boat_.pose = step_agent(boat_.pose, boat_.speed_mps, 0.0, sc_.tick_s);

    if (uav_.status == FlightStatus::grounded) {
      uav_.pose = boat_.pose;  // rides the catamaran
      return;
    }
    if (metrics_.uav_ditched) return;

    // battery failsafe: return to the (moving) boat while it is still
    // reachable, with margin for the chase
    if (!failsafe_engaged_ && command_ != UavCommand::fly_home) {
      const double d_home = distance(uav_.pose.position(), boat_.pose.position());
      const double closing = std::max(1.0, uav_.max_speed_mps - boat_.speed_mps);
      if (uav_.remaining_flight_s <= d_home / closing + 5.0 * sc_.tick_s) {
        failsafe_engaged_ = true;
        command_ = UavCommand::fly_home;
        emit(t, "battery_failsafe", json::object());
      }
    }

    Vec2 target = boat_.pose.position();
    if (command_ == UavCommand::fly_to_belief) {
      const Belief* b = belief_by_id(target_belief_);
      if (b != nullptr && !b->particles.empty()) {
        target = estimate(*b).position;
        // arrival at a surfaced candidate: loiter, then move on
        if (b->surfaced && arrival_wait_until_ < t &&
            distance(uav_.pose.position(), target) <=
                sc_.planner.rendezvous_radius_m) {
          if (!visited_.count(b->id)) {
            visited_.insert(b->id);
            arrival_wait_until_ = t + sc_.planner.arrival_wait_s;
            emit(t, "arrival", {{"belief", b->id}});
          }
        }
      }
    }

    const bool loiter = arrival_wait_until_ >= t && command_ == UavCommand::fly_to_belief;
    if (!loiter) {
      const double step = uav_.max_speed_mps * sc_.tick_s;
      const Vec2 from = uav_.pose.position();
      const double d = distance(from, target);
      if (d > 1e-9) {
        const double f = std::min(1.0, step / d);
        uav_.pose = Pose2D(from.x + (target.x - from.x) * f,
                           from.y + (target.y - from.y) * f,
                           bearing(uav_.pose, target));
      }
    }
    uav_.remaining_flight_s -= sc_.tick_s;
    flight_time_used_ += sc_.tick_s;

    if (command_ == UavCommand::fly_home &&
        distance(uav_.pose.position(), boat_.pose.position()) <=
            uav_.max_speed_mps * sc_.tick_s) {
      uav_.status = FlightStatus::grounded;
      uav_.pose = boat_.pose;
      uav_.remaining_flight_s = 0.0;
      command_ = UavCommand::none;
      visited_.clear();
      arrival_wait_until_ = -1.0;
      failsafe_engaged_ = false;
      finalize_attempt(t);
      emit(t, "land", json::object());
      return;
    }
    if (uav_.remaining_flight_s <= 0.0 && uav_.status == FlightStatus::in_flight) {
      metrics_.uav_ditched = true;
      emit(t, "ditched", json::object());
    }
  }

  void finalize_attempt(double t) {
    if (!metrics_.attempts.empty() &&
        metrics_.attempts.back().flight_time_used_s == 0.0) {
      metrics_.attempts.back().flight_time_used_s =
          flight_time_used_ - attempt_flight_base_;
      attempt_flight_base_ = flight_time_used_;
      (void)t;
    }
  }

  // ---- metrics ----
  void metrics_step(double t) {
    // localization error while a whale is truly surfaced
    for (const auto& w : truth_) {
      if (t > w.duration_s() || !w.surfaced(t)) continue;
      int idx = -1;
      for (std::size_t k = 0; k < w.surface_intervals.size(); ++k) {
        const auto& [a, b] = w.surface_intervals[k];
        if (t >= a && t < b) {
          idx = static_cast<int>(k);
          break;
        }
      }
      if (idx < 0) continue;
      const Belief* best = nullptr;
      for (const auto& b : beliefs_) {
        if (b.particles.empty()) continue;
        const auto it = meta_.find(b.id);
        if (it == meta_.end() || it->second.provenance != w.id) continue;
        if (best == nullptr || b.last_matched_t > best->last_matched_t) best = &b;
      }
      if (best == nullptr) continue;
      const double err = distance(estimate(*best).position, w.position(t));
      for (auto& m : metrics_.surfacings) {
        if (m.whale_id == w.id && m.index == idx) {
          if (err < m.min_error_m) {
            m.min_error_m = err;
            m.t_min_rel_s = t - w.surface_intervals[idx].first;
          }
          m.valid = true;
          break;
        }
      }
    }

    // rendezvous: in flight, within radius of a truly surfaced whale
    if (uav_.status == FlightStatus::in_flight && !metrics_.uav_ditched &&
        !metrics_.attempts.empty()) {
      auto& attempt = metrics_.attempts.back();
      for (const auto& w : truth_) {
        if (t > w.duration_s() || !w.surfaced(t)) continue;
        const double d = distance(uav_.pose.position(), w.position(t));
        if (attempt.best_distance_m < 0.0 || d < attempt.best_distance_m) {
          attempt.best_distance_m = d;
        }
        if (d <= sc_.planner.rendezvous_radius_m && !attempt.success) {
          attempt.success = true;
          metrics_.any_success = true;
          emit(t, "rendezvous", {{"whale", w.id}, {"distance_m", round6(d)}});
        }
      }
    }
  }

  void emit_final(double duration) {
    if (!trace_) return;
    json surf = json::array();
    for (const auto& m : metrics_.surfacings) {
      surf.push_back({{"whale", m.whale_id},
                      {"index", m.index},
                      {"min_error_m", m.valid ? round6(m.min_error_m) : -1.0},
                      {"t_min_rel_s", round6(m.t_min_rel_s)},
                      {"valid", m.valid}});
    }
    emit(duration, "metrics",
         {{"surfacings", surf},
          {"attempts", metrics_.attempts.size()},
          {"any_success", metrics_.any_success},
          {"reinit_count", metrics_.reinit_count},
          {"uav_ditched", metrics_.uav_ditched}});
  }

  Scenario sc_;
  std::ostream* trace_;
  std::mt19937_64 rng_truth_, rng_acoustic_, rng_gmm_, rng_tracker_, rng_planner_, rng_vhf_;

  std::vector<WhaleTruth> truth_;
  BoatState boat_;
  UAVState uav_;
  std::vector<Belief> beliefs_;
  std::map<int, BeliefMeta> meta_;
  int next_belief_id_ = 0;

  std::vector<AoaCluster> last_clusters_, pre_clusters_;
  Pose2D last_batch_array_pose_, pre_array_pose_;
  bool reject_pending_ = false;
  double followup_due_t_ = -1.0;

  UavCommand command_ = UavCommand::none;
  int target_belief_ = -1;
  std::set<int> visited_;
  double arrival_wait_until_ = -1.0;
  bool failsafe_engaged_ = false;
  double flight_time_used_ = 0.0;
  double attempt_flight_base_ = 0.0;

  Metrics metrics_;
};

}  // namespace

Metrics run_scenario(const Scenario& scenario, std::ostream* trace) {
  Engine e(scenario, trace);
  return e.run();
}

std::string metrics_to_csv(const Metrics& m) {
  std::ostringstream out;
  char buf[160];
  out << "metric,whale_id,index,value\n";
  for (const auto& s : m.surfacings) {
    std::snprintf(buf, sizeof(buf), "min_localization_error_m,%d,%d,%.6f\n",
                  s.whale_id, s.index, s.valid ? s.min_error_m : -1.0);
    out << buf;
    std::snprintf(buf, sizeof(buf), "t_of_min_error_s,%d,%d,%.6f\n", s.whale_id,
                  s.index, s.valid ? s.t_min_rel_s : -1.0);
    out << buf;
  }
  for (std::size_t i = 0; i < m.attempts.size(); ++i) {
    const auto& a = m.attempts[i];
    std::snprintf(buf, sizeof(buf), "attempt_success,-1,%zu,%d\n", i,
                  a.success ? 1 : 0);
    out << buf;
    std::snprintf(buf, sizeof(buf), "attempt_best_distance_m,-1,%zu,%.6f\n", i,
                  a.best_distance_m);
    out << buf;
    std::snprintf(buf, sizeof(buf), "attempt_flight_time_s,-1,%zu,%.6f\n", i,
                  a.flight_time_used_s);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "any_success,-1,-1,%d\n", m.any_success ? 1 : 0);
  out << buf;
  std::snprintf(buf, sizeof(buf), "reinit_count,-1,-1,%d\n", m.reinit_count);
  out << buf;
  std::snprintf(buf, sizeof(buf), "side_resolution_time_s,-1,-1,%.6f\n",
                m.side_resolution_time_s);
  out << buf;
  std::snprintf(buf, sizeof(buf), "uav_ditched,-1,-1,%d\n", m.uav_ditched ? 1 : 0);
  out << buf;
  return out.str();
}

}  // namespace wrv
