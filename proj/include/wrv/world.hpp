#pragma once
#include <cmath>

namespace wrv {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Wrap to [0, 2pi).
double wrap_2pi(double a);

/// Wrap to (-pi, pi].
double wrap_pi_signed(double a);

/// Absolute angular separation of two directions, in [0, pi].
double circ_dist_2pi(double a, double b);

/// Distance between two folded AOAs on the half circle [0, pi):
/// d(a, b) = min(|a - b|, pi - |a - b|). Folding makes 0 and pi adjacent.
double circ_dist_pi(double a, double b);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Planar pose in a local ENU frame (meters east/north).
/// Heading is measured counterclockwise from +x, kept in [0, 2pi).
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Pose2D() = default;
  Pose2D(double x_, double y_, double heading_);

  Vec2 position() const { return {x, y}; }
};

struct BoatState {
  Pose2D pose;
  double speed_mps = 4.0;        // catamaran operating range is 2..6 m/s
  double array_offset_m = 100.0; // towed array trails this far behind
};

enum class FlightStatus { grounded, in_flight };

struct UAVState {
  Pose2D pose;
  double max_speed_mps = 10.0;
  double remaining_flight_s = 0.0;
  FlightStatus status = FlightStatus::grounded;
};

/// World-frame bearing of `to` as seen from `from`, in [0, 2pi).
/// Throws on coincident points.
double bearing(const Pose2D& from, const Vec2& to);

/// Fold a world bearing onto the half circle [0, pi) relative to the array
/// axis. Mirror-image sources left/right of the axis map to the same value.
double fold_aoa(double world_bearing, double array_heading);

/// Unicycle step: constant speed and turn rate over dt, exact arc integration.
Pose2D step_agent(const Pose2D& state, double speed, double turn_rate, double dt);

/// Towed-array reference point: array_offset_m behind the boat along its
/// heading, with the array axis equal to the boat heading. The array had no
/// IMU in the fielded setup; its pose is extrapolated from the boat.
Pose2D array_pose(const BoatState& boat);

}  // namespace wrv
