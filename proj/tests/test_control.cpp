#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phasepush/control.hpp"

using namespace phasepush;

TEST_CASE("PID basics") {
  const PidGains gains{4e-3, 1e-3, 1e-3, 5e-6, 2.0};
  CHECK(pid_step(gains, 0.0, 0.02, PidState{}).force == 0.0);

  const PidGains p_only{2e-3, 0.0, 0.0, 1e-5, 2.0};
  PidState state;
  for (int k = 0; k < 20; ++k) {
    const PidResult r = pid_step(p_only, 0.003, 0.02, state);
    CHECK(r.force == doctest::Approx(2e-3 * 0.003).epsilon(1e-15));
    state = r.state;
  }
}

TEST_CASE("integrator stays clamped") {
  const PidGains gains{1e-3, 5e-3, 0.0, 2e-6, 2.0};
  for (bool freeze : {false, true}) {
    PidState state;
    for (int k = 0; k < 50; ++k) {  // 1 s of saturation at 50 Hz
      state = pid_step(gains, 0.01, 0.02, state, freeze).state;
      CHECK(std::abs(state.integral) <= gains.integrator_clamp);
    }
    if (freeze) CHECK(state.integral == 0.0);
    else CHECK(state.integral == doctest::Approx(gains.integrator_clamp));
  }
}

TEST_CASE("derivative acts on the filtered error") {
  const PidGains d_only{0.0, 0.0, 1.0, 1.0, 2.0};
  PidState state = pid_step(d_only, 0.0, 0.02, PidState{}).state;
  // unit step in the error: filtered rate jumps by 1/3 of the raw rate
  const PidResult r = pid_step(d_only, 0.001, 0.02, state);
  CHECK(r.force == doctest::Approx(0.05 / 3.0).epsilon(1e-12));
  // first call never kicks
  CHECK(pid_step(d_only, 0.5, 0.02, PidState{}).force == 0.0);
}

TEST_CASE("force to command") {
  const BallParams fb = BallParams::floating();
  const ControlCommand up = force_to_command(Vec2(0.0, 3e-6), Vec2::Zero(), fb, 0.006, 2500.0);
  CHECK(up.pressure_point.x() == doctest::Approx(0.0));
  CHECK(up.pressure_point.y() == doctest::Approx(-0.006).epsilon(1e-15));

  const ControlCommand nominal = force_to_command(Vec2(7.65e-6, 0.0), Vec2::Zero(), fb, 0.006, 2500.0);
  CHECK(nominal.pressure == doctest::Approx(1709.1).epsilon(1e-12));
  CHECK_FALSE(nominal.saturated);

  const ControlCommand big = force_to_command(Vec2(0.0, -2e-5), Vec2::Zero(), fb, 0.006, 2500.0);
  CHECK(big.pressure == 2500.0);
  CHECK(big.saturated);
  CHECK(big.commanded_force(fb).norm() == doctest::Approx(fb.pressure_to_force * (2500.0 - 709.1)));

  const ControlCommand idle = force_to_command(Vec2(1e-10, 0.0), Vec2(0.001, 0.0), fb, 0.006, 2500.0, 1.0);
  CHECK(idle.pressure == fb.pressure_offset);
  CHECK(idle.angle == 1.0);
  CHECK((idle.pressure_point - Vec2(0.001, 0.0)).norm() == doctest::Approx(0.006).epsilon(1e-12));
  CHECK(idle.commanded_force(fb).norm() == 0.0);

  CHECK_THROWS_AS(force_to_command(Vec2(1e-6, 0), Vec2::Zero(), fb, 0.0, 2500.0), InvalidArgumentError);
  CHECK_THROWS_AS(force_to_command(Vec2(1e-6, 0), Vec2::Zero(), fb, 0.006, 500.0), InvalidArgumentError);
}

TEST_CASE("command invariants") {
  const BallParams fb = BallParams::floating();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec2 force = 2e-5 * Vec2(u(rng), u(rng));
    const Vec2 est = 0.02 * Vec2(u(rng), u(rng));
    const ControlCommand c = force_to_command(force, est, fb, 0.006, 2500.0);
    CHECK(std::abs((c.pressure_point - est).norm() - 0.006) < 1e-12);
    CHECK((est - c.pressure_point).dot(force) >= 0.0);
    CHECK(c.pressure >= fb.pressure_offset);
    CHECK(c.pressure <= 2500.0);

    // rotating the force rotates the point about the estimate
    const Eigen::Rotation2Dd rot(u(rng) * kPi);
    const ControlCommand r = force_to_command(rot * force, est, fb, 0.006, 2500.0);
    CHECK((r.pressure_point - (est + rot * (c.pressure_point - est))).norm() < 1e-12);
  }

  double previous = 0.0;
  for (double mag = 0.0; mag < 3e-5; mag += 1e-7) {
    const double p = force_to_command(Vec2(mag, 0.0), Vec2::Zero(), fb, 0.006, 2500.0).pressure;
    CHECK(p >= previous);
    previous = p;
  }
}
