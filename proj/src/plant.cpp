#include "phasepush/plant.hpp"

#include <cmath>
#include <string>

namespace phasepush {

BallParams BallParams::floating() { return BallParams{}; }

BallParams BallParams::solid() {
  BallParams p;
  p.friction = 3.18e-4;
  p.pressure_to_force = 2.64e-8;
  p.pressure_offset = 0.0;
  p.area_radius = 0.010;
  return p;
}

void BallParams::validate() const {
  if (!(mass > 0.0)) throw InvalidArgumentError("ball mass must be positive");
  if (!(friction >= 0.0) || !(pressure_to_force >= 0.0) || !(pressure_offset >= 0.0) ||
      !(ball_radius >= 0.0) || !(area_radius >= 0.0)) {
    throw InvalidArgumentError("ball parameters must be non-negative");
  }
}

Vec2 acoustic_force(const BallParams& params, const BallState& state, const Vec2& pressure_point,
                    double pressure) {
  const Vec2 offset = state.position - pressure_point;
  const double distance = offset.norm();
  const double excess = std::max(pressure - params.pressure_offset, 0.0);
  if (distance < 1e-9 || excess == 0.0) return Vec2::Zero();
  return params.pressure_to_force * excess * offset / distance;
}

BallState integrate(const BallParams& params, const BallState& state, const Vec2& force, double dt,
                    double substep) {
  if (!(dt > 0.0)) throw InvalidArgumentError("time step must be positive");
  if (!(substep > 0.0)) throw InvalidArgumentError("substep must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(dt / substep - 1e-9)));
  const double h = dt / n;
  const double damping = params.friction / params.mass;
  const Vec2 accel_in = force / params.mass;
  auto accel = [&](const Vec2& v) -> Vec2 { return accel_in - damping * v; };

  Vec2 x = state.position;
  Vec2 v = state.velocity;
  for (int i = 0; i < n; ++i) {
    const Vec2 k1x = v;
    const Vec2 k1v = accel(v);
    const Vec2 k2x = v + 0.5 * h * k1v;
    const Vec2 k2v = accel(k2x);
    const Vec2 k3x = v + 0.5 * h * k2v;
    const Vec2 k3v = accel(k3x);
    const Vec2 k4x = v + h * k3v;
    const Vec2 k4v = accel(k4x);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return {x, v, state.time + dt};
}

BallState step(const BallParams& params, const BallState& state, const Vec2& pressure_point,
               double pressure, double dt, double substep) {
  if (!(pressure >= 0.0)) throw InvalidArgumentError("pressure amplitude must be non-negative");
  const Vec2 force = acoustic_force(params, state, pressure_point, pressure);
  BallState next = integrate(params, state, force, dt, substep);
  if (next.position.norm() > params.area_radius + kAreaGuard) {
    throw OutOfAreaError("ball left the manipulation area at t = " + std::to_string(next.time) +
                             " s (r = " + std::to_string(next.position.norm() * 1e3) + " mm)",
                         next);
  }
  return next;
}

AxisModel discretize_axis_model(const BallParams& params, double dt) {
  if (!(dt > 0.0)) throw InvalidArgumentError("time step must be positive");
  params.validate();
  const double a = params.friction / params.mass;
  const double m = params.mass;
  // decay = exp(-a dt); gain = (1 - decay) / a; drift = (dt - gain) / a
  double gain;
  double drift;
  const double ad = a * dt;
  if (ad < 1e-5) {
    gain = dt * (1.0 - ad / 2.0 + ad * ad / 6.0);
    drift = dt * dt * (0.5 - ad / 6.0 + ad * ad / 24.0);
  } else {
    gain = -std::expm1(-ad) / a;
    drift = (dt - gain) / a;
  }
  AxisModel model;
  model.transition << 1.0, gain, 0.0, std::exp(-ad);
  model.input << drift / m, gain / m;
  model.dt = dt;
  return model;
}

}  // namespace phasepush
