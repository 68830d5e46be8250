#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "phasepush/control.hpp"
#include "phasepush/estimator.hpp"
#include "phasepush/focus.hpp"
#include "phasepush/geometry.hpp"
#include "phasepush/plant.hpp"
#include "phasepush/reference.hpp"

namespace phasepush {

/// Floating ball (FB) or ball on a solid surface (BS).
enum class Scenario { kFloating, kSolid };

const char* to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);

struct GeometryConfig {
  int rows = 8;
  int cols = 8;
  double pitch = 0.0105;       ///< [m]
  TransducerConstants constants;
  double plane_height = 0.065;  ///< manipulation plane above the array [m]

  ArrayGeometry build() const {
    return ArrayGeometry::planar_grid(rows, cols, pitch, constants);
  }
};

struct SensorConfig {
  double noise_std = 0.001;  ///< [m]
  int delay = 4;             ///< [periods]
};

struct EstimatorSettings {
  int delay = 4;
  double process_noise_density = 1e-4;  ///< white acceleration density [m^2/s^3]
  double measurement_std = 0.001;       ///< [m]
  double initial_position_std = 0.002;  ///< [m]
  double initial_velocity_std = 0.01;   ///< [m/s]

  EstimatorConfig build(double dt) const;
};

struct LoopConfig {
  Scenario scenario = Scenario::kFloating;
  double dt = 0.02;         ///< control period [s]
  double duration = 20.0;   ///< [s]
  std::uint64_t seed = 1;
  GeometryConfig geometry;
  BallParams ball;
  BallState initial_state;
  double pressure_limit = 2500.0;   ///< P_max [Pa]
  double point_distance = 0.006;    ///< R [m]
  double quantization_step = kDegreeStep;  ///< [rad]
  SolverSettings solver;
  bool warm_start = true;
  int random_restart_period = 25;  ///< cold solve every this many periods (0: never)
  PidGains pid;
  EstimatorSettings estimator;
  SensorConfig sensor;
  ReferenceSpec reference;

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  static LoopConfig defaults(Scenario scenario);
};

nlohmann::json to_json(const LoopConfig& config);

/// Parses a config document. Missing keys take the scenario defaults
/// (scenario "fb" unless given); unknown keys are rejected.
LoopConfig loop_config_from_json(const nlohmann::json& doc);

LoopConfig load_loop_config(const std::string& path);

}  // namespace phasepush
