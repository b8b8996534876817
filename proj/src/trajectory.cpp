#include "wrv/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wrv {

Vec2 WhaleTruth::position(double t_s) const {
  if (ts.empty()) throw std::logic_error("WhaleTruth: empty track");
  if (t_s <= ts.front()) return xs.front();
  if (t_s >= ts.back()) return xs.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t_s);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin());
  const double t0 = ts[i - 1], t1 = ts[i];
  const double f = (t_s - t0) / (t1 - t0);
  return xs[i - 1] + (xs[i] - xs[i - 1]) * f;
}

bool WhaleTruth::surfaced(double t_s) const {
  for (const auto& [a, b] : surface_intervals) {
    if (t_s >= a && t_s < b) return true;
    if (a > t_s) break;
  }
  return false;
}

namespace {

struct Row {
  double t;
  int id;
  double x, y;
  int flag;
};

[[noreturn]] void fail_row(std::size_t row, const std::string& what) {
  throw std::runtime_error("trajectory row " + std::to_string(row) + ": " + what);
}

}  // namespace

std::vector<WhaleTruth> load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trajectory: cannot open " + path);

  std::vector<Row> rows;
  std::map<int, double> last_t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.find("t_s") != std::string::npos) continue;  // header
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) fail_row(lineno, "expected 5 columns (t_s, whale_id, x_m, y_m, surfaced_flag)");
    Row r;
    try {
      r.t = std::stod(fields[0]);
      r.id = std::stoi(fields[1]);
      r.x = std::stod(fields[2]);
      r.y = std::stod(fields[3]);
      r.flag = std::stoi(fields[4]);
    } catch (const std::exception&) {
      fail_row(lineno, "unparseable field");
    }
    if (!std::isfinite(r.t) || !std::isfinite(r.x) || !std::isfinite(r.y)) {
      fail_row(lineno, "non-finite value");
    }
    if (r.flag != 0 && r.flag != 1) fail_row(lineno, "surfaced_flag must be 0 or 1");
    const auto lt = last_t.find(r.id);
    if (lt != last_t.end() && lt->second >= r.t) {
      fail_row(lineno, "time not strictly increasing for whale " + std::to_string(r.id));
    }
    last_t[r.id] = r.t;
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("trajectory: no data rows in " + path);

  std::map<int, WhaleTruth> by_id;
  std::map<int, int> last_flag;
  std::map<int, double> open_start;
  for (const auto& r : rows) {
    auto& w = by_id[r.id];
    w.id = r.id;
    w.ts.push_back(r.t);
    w.xs.push_back({r.x, r.y});
    const auto lf = last_flag.find(r.id);
    const int prev = lf == last_flag.end() ? 0 : lf->second;
    if (r.flag == 1 && prev == 0) open_start[r.id] = r.t;
    if (r.flag == 0 && prev == 1) {
      w.surface_intervals.emplace_back(open_start[r.id], r.t);
    }
    last_flag[r.id] = r.flag;
  }
  for (auto& [id, w] : by_id) {
    if (last_flag[id] == 1) {
      w.surface_intervals.emplace_back(open_start[id], w.ts.back());
    }
  }

  std::vector<WhaleTruth> out;
  out.reserve(by_id.size());
  for (auto& [id, w] : by_id) out.push_back(std::move(w));
  return out;
}

WhaleTruth synth_trajectory(int id, const SynthWhaleParams& params,
                            const DiveModelParams& dive, std::mt19937_64& rng) {
  WhaleTruth w;
  w.id = id;

  // schedule first: the whale dives at t = 0, cover n_surfacings intervals
  SurfaceSchedule sched;
  {
    // oversample the horizon until enough intervals exist
    double horizon = params.n_surfacings * 2.0 * cycle_period_s(dive) + 600.0;
    for (int tries = 0; tries < 16; ++tries) {
      std::mt19937_64 trial_rng(rng());
      sched = sample_schedule(dive, 0.0, DiveAnchorState::underwater_since,
                              horizon, trial_rng);
      if (static_cast<int>(sched.intervals.size()) >= params.n_surfacings) break;
      horizon *= 1.5;
    }
  }
  if (static_cast<int>(sched.intervals.size()) > params.n_surfacings) {
    sched.intervals.resize(params.n_surfacings);
  }
  const double duration = sched.intervals.empty()
                              ? 600.0
                              : sched.intervals.back().second + 60.0;
  w.surface_intervals = sched.intervals;

  std::uniform_real_distribution<double> speed_dist(params.speed_min_mps,
                                                    params.speed_max_mps);
  std::uniform_real_distribution<double> h0(0.0, kTwoPi);
  std::normal_distribution<double> turn(0.0, params.turn_sigma_rad);

  double heading = h0(rng);
  double speed = speed_dist(rng);
  Vec2 pos{params.x0, params.y0};
  const double dt = 1.0;
  for (double t = 0.0; t <= duration + dt; t += dt) {
    w.ts.push_back(t);
    w.xs.push_back(pos);
    if (static_cast<long>(t) % 120 == 0 && t > 0.0) speed = speed_dist(rng);
    heading = wrap_2pi(heading + turn(rng) * std::sqrt(dt));
    pos.x += speed * dt * std::cos(heading);
    pos.y += speed * dt * std::sin(heading);
  }
  return w;
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<WhaleTruth>& whales, double step_s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("trajectory: cannot write " + path);
  out << "t_s,whale_id,x_m,y_m,surfaced_flag\n";
  char buf[160];
  for (const auto& w : whales) {
    for (double t = 0.0; t <= w.duration_s(); t += step_s) {
      const Vec2 p = w.position(t);
      std::snprintf(buf, sizeof(buf), "%.3f,%d,%.3f,%.3f,%d\n", t, w.id, p.x,
                    p.y, w.surfaced(t) ? 1 : 0);
      out << buf;
    }
  }
}

}  // namespace wrv
