#pragma once

#include <string>
#include <vector>

#include "phasepush/config.hpp"

namespace phasepush {

/// Everything observed during one control period.
struct StepRecord {
  double time = 0.0;
  Vec2 reference = Vec2::Zero();
  BallState truth;                 ///< at the start of the period
  Vec2 measured = Vec2::Zero();    ///< delayed, noisy position delivered this period
  Vec2 estimated_position = Vec2::Zero();
  Vec2 estimated_velocity = Vec2::Zero();
  Vec2 force = Vec2::Zero();       ///< PID force demand [N]
  Vec2 pressure_point = Vec2::Zero();
  double commanded_pressure = 0.0;  ///< P_des from the controller [Pa]
  double target_pressure = 0.0;     ///< P_des handed to the solver (capped at the bound) [Pa]
  double achieved_pressure = 0.0;   ///< |p| at the point with the applied phases [Pa]
  int solver_iterations = 0;
  double solver_seconds = 0.0;     ///< wall clock, not reproducible
  bool solver_ok = true;
  bool saturated = false;
  bool out_of_area = false;
};

enum class RunStatus { kCompleted, kOutOfArea };

const char* to_string(RunStatus status);

struct RunLog {
  std::vector<StepRecord> records;
  RunStatus status = RunStatus::kCompleted;
  std::string failure;
  int solver_failures = 0;
};

/// Deterministic closed-loop simulation at the configured period:
/// sense -> estimate -> PID -> pressure command -> phase solve -> quantize ->
/// field evaluation -> plant step.
RunLog run_loop(const LoopConfig& config);

struct RunSummary {
  std::size_t steps = 0;
  double rms_error = 0.0;  ///< true position vs reference [m]
  double max_error = 0.0;
  double solver_p50_seconds = 0.0;
  double solver_p95_seconds = 0.0;
  double saturation_duty = 0.0;
  int solver_failures = 0;
  RunStatus status = RunStatus::kCompleted;
  std::string failure;
};

/// Summary over records with time >= `from_time`.
RunSummary summarize(const RunLog& log, double from_time = 0.0);

}  // namespace phasepush
