#pragma once

#include <Eigen/Dense>

#include "phasepush/plant.hpp"

namespace phasepush {

/// Per-axis Kalman filter settings.
struct EstimatorConfig {
  int delay = 4;  ///< measurement delay d [samples]
  Eigen::Matrix2d process_noise = Eigen::Matrix2d::Zero();  ///< on (position, velocity), SI
  double measurement_variance = 1e-6;                         ///< [m^2]
  double initial_position_variance = 4e-6;                    ///< [m^2], also the delay slots
  double initial_velocity_variance = 1e-4;                    ///< [m^2/s^2]

  void validate() const;
};

/// Discrete covariance of white acceleration noise with spectral density q
/// [m^2/s^3] over one period dt.
Eigen::Matrix2d white_acceleration_noise(double density, double dt);

/// Augmented state (position, velocity, x[k-1], ..., x[k-d]) and covariance.
struct EstimatorState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  double position() const { return mean[0]; }
  double velocity() const { return mean[1]; }
  /// Slot read by the (delayed) measurement.
  double observed_slot() const { return mean.size() == 2 ? mean[0] : mean[mean.size() - 1]; }
};

/// Ball at rest at `position` for at least d periods.
EstimatorState initial_estimator_state(const EstimatorConfig& config, double position,
                                       double velocity = 0.0);

/// Augmented transition: plant block from `model`, delay chain shifted by one.
Eigen::MatrixXd augmented_transition(const AxisModel& model, int delay);

EstimatorState predict(const AxisModel& model, const EstimatorConfig& config,
                       const EstimatorState& state, double force);

/// Joseph-form correction with a measurement of the oldest delay slot.
EstimatorState update(const EstimatorConfig& config, const EstimatorState& state,
                      double measurement);

/// One axis of the delay-compensating estimator.
class DelayKalmanFilter {
 public:
  DelayKalmanFilter(const BallParams& params, double dt, EstimatorConfig config,
                    double initial_position, double initial_velocity = 0.0);

  void predict(double force);
  void update(double measurement);

  const EstimatorState& state() const { return state_; }
  const EstimatorConfig& config() const { return config_; }
  const AxisModel& model() const { return model_; }

 private:
  AxisModel model_;
  EstimatorConfig config_;
  EstimatorState state_;
};

}  // namespace phasepush
