#pragma once

#include "phasepush/common.hpp"

namespace phasepush {

/// Identified constants of the manipulated ball, per scenario.
struct BallParams {
  double mass = 2.4261472866e-4;           ///< [kg], polypropylene sphere of 4 mm radius
  double friction = 4.44e-4;               ///< c_f [N s/m]
  double pressure_to_force = 7.65e-9;      ///< c_p [N/Pa]
  double pressure_offset = 709.1;          ///< P_off [Pa]
  double ball_radius = 0.004;              ///< [m]
  double area_radius = 0.021;              ///< manipulation area radius [m]

  /// Ball floating in shallow water.
  static BallParams floating();
  /// Ball rolling on a solid surface.
  static BallParams solid();

  void validate() const;
};

/// Distance beyond the manipulation area at which a simulation is abandoned.
inline constexpr double kAreaGuard = 0.005;

struct BallState {
  Vec2 position = Vec2::Zero();  ///< in the manipulation plane [m]
  Vec2 velocity = Vec2::Zero();  ///< [m/s]
  double time = 0.0;             ///< [s]
};

/// Raised by `step` when the ball leaves the manipulation area plus guard.
class OutOfAreaError : public Error {
 public:
  OutOfAreaError(const std::string& what, BallState state) : Error(what), state_(state) {}
  const BallState& state() const { return state_; }

 private:
  BallState state_;
};

/// Push of a pressure point on the ball: magnitude c_p * max(|p| - P_off, 0),
/// directed from the point toward the ball.
Vec2 acoustic_force(const BallParams& params, const BallState& state, const Vec2& pressure_point,
                    double pressure);

/// Advances the ball by dt under a force held constant over the interval,
/// integrating m*a = -c_f*v + F with RK4 at substeps of at most `substep`.
BallState step(const BallParams& params, const BallState& state, const Vec2& pressure_point,
               double pressure, double dt, double substep = 1e-3);

/// Same integration for an explicit force (no area guard).
BallState integrate(const BallParams& params, const BallState& state, const Vec2& force, double dt,
                    double substep = 1e-3);

/// Exact zero-order-hold discretization of one axis, state (position, velocity).
struct AxisModel {
  Eigen::Matrix2d transition;
  Eigen::Vector2d input;
  double dt;
};

AxisModel discretize_axis_model(const BallParams& params, double dt);

}  // namespace phasepush
