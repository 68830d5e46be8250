#include "phasepush/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace phasepush {

const char* to_string(RunStatus status) {
  return status == RunStatus::kCompleted ? "completed" : "out_of_area";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace

RunLog run_loop(const LoopConfig& config) {
  config.validate();
  const ArrayGeometry geometry = config.geometry.build();
  const ReferenceTrajectory reference(config.reference);
  const EstimatorConfig est_config = config.estimator.build(config.dt);
  const double z = config.geometry.plane_height;

  std::mt19937_64 sensor_rng(splitmix64(config.seed));
  std::normal_distribution<double> sensor_noise(0.0, 1.0);

  BallState truth = config.initial_state;
  truth.time = 0.0;
  // the ball rests at its initial position before the run starts
  std::deque<Vec2> history(static_cast<std::size_t>(config.sensor.delay) + 1, truth.position);

  std::vector<DelayKalmanFilter> filters;
  PidState pid_x;
  PidState pid_y;
  double angle = 0.0;
  bool saturated = false;
  std::vector<double> phases;  // last optimizer output (unquantized)
  PhaseVector applied = PhaseVector::zeros(geometry.size());

  RunLog log;
  const auto steps = static_cast<std::size_t>(std::floor(config.duration / config.dt + 1e-9));
  log.records.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    StepRecord rec;
    rec.time = static_cast<double>(k) * config.dt;
    rec.reference = reference.position(rec.time);
    rec.truth = truth;

    // sense: position from `delay` periods ago plus noise
    const Vec2 delayed = history.front();
    rec.measured = delayed + config.sensor.noise_std *
                                 Vec2(sensor_noise(sensor_rng), sensor_noise(sensor_rng));

    if (filters.empty()) {
      filters.emplace_back(config.ball, config.dt, est_config, rec.measured.x());
      filters.emplace_back(config.ball, config.dt, est_config, rec.measured.y());
    } else {
      filters[0].update(rec.measured.x());
      filters[1].update(rec.measured.y());
    }
    rec.estimated_position = Vec2(filters[0].state().position(), filters[1].state().position());
    rec.estimated_velocity = Vec2(filters[0].state().velocity(), filters[1].state().velocity());

    const Vec2 error = rec.reference - rec.estimated_position;
    const PidResult fx = pid_step(config.pid, error.x(), config.dt, pid_x, saturated);
    const PidResult fy = pid_step(config.pid, error.y(), config.dt, pid_y, saturated);
    pid_x = fx.state;
    pid_y = fy.state;
    rec.force = Vec2(fx.force, fy.force);

    const ControlCommand cmd = force_to_command(rec.force, rec.estimated_position, config.ball,
                                                config.point_distance, config.pressure_limit, angle);
    angle = cmd.angle;
    saturated = cmd.saturated;
    rec.saturated = cmd.saturated;
    rec.pressure_point = cmd.pressure_point;
    rec.commanded_pressure = cmd.pressure;

    const Vec3 point(cmd.pressure_point.x(), cmd.pressure_point.y(), z);
    try {
      rec.target_pressure = std::min(cmd.pressure, alignment_bound(geometry, point));
      SolverSettings settings = config.solver;
      settings.seed = splitmix64(config.seed ^ splitmix64(k + 1));
      const bool cold = phases.empty() || !config.warm_start ||
                        (config.random_restart_period > 0 &&
                         k % static_cast<std::size_t>(config.random_restart_period) == 0);
      SolveReport report;
      if (cold) {
        report = solve_focus(geometry, {point, rec.target_pressure}, settings);
      } else {
        settings.restarts = 1;
        report = solve_focus(geometry, {point, rec.target_pressure}, settings,
                             std::span<const double>(phases));
      }
      rec.solver_iterations = report.total_iterations;
      rec.solver_seconds = report.duration_seconds;
      phases = report.phases.vector();
      applied = quantize_phases(report.phases, config.quantization_step);
    } catch (const Error&) {
      // keep the previous phases
      rec.solver_ok = false;
      ++log.solver_failures;
    }

    rec.achieved_pressure = std::abs(field_pressure(geometry, applied, point));

    const Vec2 commanded = cmd.commanded_force(config.ball);
    try {
      truth = step(config.ball, truth, cmd.pressure_point, rec.achieved_pressure, config.dt);
    } catch (const OutOfAreaError& e) {
      rec.out_of_area = true;
      log.records.push_back(rec);
      log.status = RunStatus::kOutOfArea;
      log.failure = e.what();
      return log;
    }
    filters[0].predict(commanded.x());
    filters[1].predict(commanded.y());
    history.pop_front();
    history.push_back(truth.position);
    log.records.push_back(rec);
  }
  return log;
}

RunSummary summarize(const RunLog& log, double from_time) {
  RunSummary s;
  s.status = log.status;
  s.failure = log.failure;
  s.solver_failures = log.solver_failures;
  std::vector<double> durations;
  double sum_sq = 0.0;
  std::size_t saturated = 0;
  for (const StepRecord& r : log.records) {
    if (r.time < from_time - 1e-12) continue;
    const double e = (r.truth.position - r.reference).norm();
    sum_sq += e * e;
    s.max_error = std::max(s.max_error, e);
    durations.push_back(r.solver_seconds);
    if (r.saturated) ++saturated;
    ++s.steps;
  }
  if (s.steps > 0) {
    s.rms_error = std::sqrt(sum_sq / static_cast<double>(s.steps));
    s.saturation_duty = static_cast<double>(saturated) / static_cast<double>(s.steps);
  }
  s.solver_p50_seconds = percentile(durations, 0.5);
  s.solver_p95_seconds = percentile(durations, 0.95);
  return s;
}

}  // namespace phasepush
