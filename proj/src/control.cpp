#include "phasepush/control.hpp"

#include <algorithm>
#include <cmath>

namespace phasepush {

void PidGains::validate() const {
  if (!(kp >= 0.0) || !(ki >= 0.0) || !(kd >= 0.0)) {
    throw InvalidArgumentError("PID gains must be non-negative");
  }
  if (!(integrator_clamp > 0.0)) throw InvalidArgumentError("integrator clamp must be positive");
  if (!(derivative_filter >= 0.0)) throw InvalidArgumentError("derivative filter must be >= 0");
}

PidResult pid_step(const PidGains& gains, double error, double dt, const PidState& state,
                   bool freeze_integrator) {
  if (!(dt > 0.0)) throw InvalidArgumentError("time step must be positive");
  PidState next = state;
  if (!state.initialized) {
    next.previous_error = error;
    next.derivative = 0.0;
    next.initialized = true;
  }
  const double raw_rate = (error - next.previous_error) / dt;
  const double tau = gains.derivative_filter * dt;
  next.derivative += dt / (tau + dt) * (raw_rate - next.derivative);
  next.previous_error = error;
  if (!freeze_integrator) {
    next.integral = std::clamp(next.integral + gains.ki * error * dt, -gains.integrator_clamp,
                               gains.integrator_clamp);
  }
  return {gains.kp * error + next.integral + gains.kd * next.derivative, next};
}

Vec2 ControlCommand::commanded_force(const BallParams& params) const {
  const double magnitude = params.pressure_to_force * (pressure - params.pressure_offset);
  return magnitude * Vec2(std::cos(angle), std::sin(angle));
}

ControlCommand force_to_command(const Vec2& force, const Vec2& estimated_position,
                                const BallParams& params, double point_distance,
                                double max_pressure, double previous_angle) {
  if (!(point_distance > 0.0)) throw InvalidArgumentError("pressure point distance must be > 0");
  if (!(params.pressure_to_force > 0.0)) {
    throw InvalidArgumentError("pressure-to-force constant must be positive");
  }
  if (!(max_pressure >= params.pressure_offset)) {
    throw InvalidArgumentError("pressure limit is below the pressure offset");
  }
  ControlCommand cmd;
  cmd.force = force;
  const double magnitude = force.norm();
  if (magnitude < kForceDeadband) {
    cmd.angle = previous_angle;
    cmd.pressure = params.pressure_offset;
  } else {
    cmd.angle = std::atan2(force.y(), force.x());
    const double wanted = magnitude / params.pressure_to_force + params.pressure_offset;
    cmd.pressure = std::clamp(wanted, params.pressure_offset, max_pressure);
    cmd.saturated = cmd.pressure != wanted;
  }
  cmd.pressure_point =
      estimated_position - point_distance * Vec2(std::cos(cmd.angle), std::sin(cmd.angle));
  return cmd;
}

}  // namespace phasepush
