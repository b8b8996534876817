#include "wrv/world.hpp"

#include <stdexcept>

namespace wrv {

double wrap_2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod rounding can land exactly on 2pi
  return r;
}

double wrap_pi_signed(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r = kPi;
  return r;
}

double circ_dist_2pi(double a, double b) {
  return std::fabs(wrap_pi_signed(a - b));
}

double circ_dist_pi(double a, double b) {
  double d = std::fabs(a - b);
  d = std::fmod(d, kPi);
  return std::min(d, kPi - d);
}

Pose2D::Pose2D(double x_, double y_, double heading_)
    : x(x_), y(y_), heading(wrap_2pi(heading_)) {}

double bearing(const Pose2D& from, const Vec2& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (dx == 0.0 && dy == 0.0) {
    throw std::invalid_argument("degenerate bearing: coincident points");
  }
  return wrap_2pi(std::atan2(dy, dx));
}

double fold_aoa(double world_bearing, double array_heading) {
  const double rel = wrap_2pi(world_bearing - array_heading);
  double folded = rel < kPi ? rel : kTwoPi - rel;
  // rel == pi folds onto itself; nudge inside the half-open range
  if (folded >= kPi) folded = std::nextafter(kPi, 0.0);
  return folded;
}

Pose2D step_agent(const Pose2D& state, double speed, double turn_rate, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step_agent: dt must be positive");
  const double h0 = state.heading;
  const double h1 = h0 + turn_rate * dt;
  double x = state.x;
  double y = state.y;
  if (std::fabs(turn_rate) < 1e-12) {
    x += speed * dt * std::cos(h0);
    y += speed * dt * std::sin(h0);
  } else {
    const double r = speed / turn_rate;
    x += r * (std::sin(h1) - std::sin(h0));
    y -= r * (std::cos(h1) - std::cos(h0));
  }
  return Pose2D(x, y, h1);
}

Pose2D array_pose(const BoatState& boat) {
  const double h = boat.pose.heading;
  return Pose2D(boat.pose.x - boat.array_offset_m * std::cos(h),
                boat.pose.y - boat.array_offset_m * std::sin(h), h);
}

}  // namespace wrv
