#pragma once

#include <string>
#include <vector>

#include "phasepush/common.hpp"

namespace phasepush {

enum class ReferenceKind { kSetpoint, kCircle, kEightFigure, kWaypoints };

const char* to_string(ReferenceKind kind);
ReferenceKind reference_kind_from_string(const std::string& name);

struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::kSetpoint;
  Vec2 center = Vec2::Zero();  ///< setpoint, circle center, eight-figure center [m]
  double radius = 0.0;         ///< circle radius [m]
  /// Eight-figure half extents: (a sin wt, b sin 2wt) [m].
  Vec2 extent = Vec2(0.015, 0.008);
  std::vector<Vec2> waypoints;  ///< visited in order [m]
  double speed = 0.01;          ///< traversal speed [m/s]
  double dwell = 2.0;           ///< hold time at each waypoint [s]
};

/// Reference position generator with precomputed timing.
class ReferenceTrajectory {
 public:
  explicit ReferenceTrajectory(ReferenceSpec spec);

  Vec2 position(double t) const;
  const ReferenceSpec& spec() const { return spec_; }

  /// Angular rate of the circle / eight-figure parameter [rad/s].
  double angular_rate() const { return omega_; }
  /// Duration of one lap (circle, eight-figure) or of the whole route (waypoints) [s].
  double period() const { return period_; }
  /// Time at which waypoint i is first reached (waypoints only).
  double arrival_time(std::size_t i) const { return arrivals_.at(i); }

  /// Largest distance from the origin over the whole trajectory [m].
  double max_radius() const;

 private:
  ReferenceSpec spec_;
  double omega_ = 0.0;
  double period_ = 0.0;
  std::vector<double> arrivals_;
};

/// Arc length of (a sin s, b sin 2s) over one period, by composite Simpson.
double eight_figure_lap_length(double a, double b);

/// Evaluates a trajectory once; convenience for one-off queries.
Vec2 make_reference(const ReferenceSpec& spec, double t);

/// Throws ConfigError when the trajectory leaves a disc of `area_radius`.
void validate_reference(const ReferenceSpec& spec, double area_radius);

}  // namespace phasepush
