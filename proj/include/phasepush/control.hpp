#pragma once

#include "phasepush/common.hpp"
#include "phasepush/plant.hpp"

namespace phasepush {

struct PidGains {
  double kp = 0.0;  ///< [N/m]
  double ki = 0.0;  ///< [N/(m s)]
  double kd = 0.0;  ///< [N s/m]
  double integrator_clamp = 1e-5;  ///< bound on the integral term [N]
  /// Derivative filter time constant in units of the sample period.
  double derivative_filter = 2.0;

  void validate() const;
};

struct PidState {
  double integral = 0.0;  ///< integral term, already scaled by ki [N]
  double derivative = 0.0;  ///< filtered error rate [m/s]
  double previous_error = 0.0;
  bool initialized = false;
};

struct PidResult {
  double force;
  PidState state;
};

/// Parallel PID on the position error. The integral is clamped and held
/// while `freeze_integrator` is set (downstream saturation); the derivative
/// acts on the first-order filtered error rate.
PidResult pid_step(const PidGains& gains, double error, double dt, const PidState& state,
                   bool freeze_integrator = false);

/// Forces below this magnitude keep the previous push direction and command
/// no excess pressure.
inline constexpr double kForceDeadband = 1e-9;

struct ControlCommand {
  Vec2 pressure_point = Vec2::Zero();  ///< [m]
  double pressure = 0.0;               ///< P_des [Pa]
  Vec2 force = Vec2::Zero();           ///< raw force demand [N]
  double angle = 0.0;                  ///< push direction alpha [rad]
  bool saturated = false;

  /// Force the command actually asks for after the pressure clamp.
  Vec2 commanded_force(const BallParams& params) const;
};

/// Places a pressure point R behind the estimated ball, opposite the demanded
/// force, with amplitude |F|/c_p + P_off clamped to [P_off, P_max].
ControlCommand force_to_command(const Vec2& force, const Vec2& estimated_position,
                                const BallParams& params, double point_distance,
                                double max_pressure, double previous_angle = 0.0);

}  // namespace phasepush
