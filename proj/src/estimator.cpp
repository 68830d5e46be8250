#include "phasepush/estimator.hpp"

#include <cmath>
#include <string>

namespace phasepush {

void EstimatorConfig::validate() const {
  if (delay < 0) throw InvalidArgumentError("estimator delay must be >= 0");
  if (!(measurement_variance > 0.0)) {
    throw InvalidArgumentError("measurement variance must be positive");
  }
  if (!(initial_position_variance >= 0.0) || !(initial_velocity_variance >= 0.0)) {
    throw InvalidArgumentError("initial variances must be non-negative");
  }
  if ((process_noise - process_noise.transpose()).cwiseAbs().maxCoeff() > 1e-15 ||
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(process_noise).eigenvalues().minCoeff() <
          -1e-18) {
    throw InvalidArgumentError("process noise must be symmetric positive semidefinite");
  }
}

Eigen::Matrix2d white_acceleration_noise(double density, double dt) {
  Eigen::Matrix2d q;
  q << dt * dt * dt / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt;
  return density * q;
}

EstimatorState initial_estimator_state(const EstimatorConfig& config, double position,
                                       double velocity) {
  config.validate();
  const int n = 2 + config.delay;
  EstimatorState s;
  s.mean = Eigen::VectorXd::Constant(n, position);
  s.mean[1] = velocity;
  s.covariance = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    s.covariance(i, i) = i == 1 ? config.initial_velocity_variance : config.initial_position_variance;
  }
  return s;
}

Eigen::MatrixXd augmented_transition(const AxisModel& model, int delay) {
  const int n = 2 + delay;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  f.topLeftCorner<2, 2>() = model.transition;
  if (delay > 0) f(2, 0) = 1.0;
  for (int i = 3; i < n; ++i) f(i, i - 1) = 1.0;
  return f;
}

namespace {

void check_size(const EstimatorConfig& config, const EstimatorState& state) {
  const auto n = 2 + config.delay;
  if (state.mean.size() != n || state.covariance.rows() != n || state.covariance.cols() != n) {
    throw DimensionError("estimator state has size " + std::to_string(state.mean.size()) +
                         ", expected " + std::to_string(n));
  }
}

}  // namespace

EstimatorState predict(const AxisModel& model, const EstimatorConfig& config,
                       const EstimatorState& state, double force) {
  check_size(config, state);
  const Eigen::MatrixXd f = augmented_transition(model, config.delay);
  EstimatorState next;
  next.mean = f * state.mean;
  next.mean.head<2>() += model.input * force;
  next.covariance = f * state.covariance * f.transpose();
  next.covariance.topLeftCorner<2, 2>() += config.process_noise;
  next.covariance = 0.5 * (next.covariance + next.covariance.transpose()).eval();
  return next;
}

EstimatorState update(const EstimatorConfig& config, const EstimatorState& state,
                      double measurement) {
  check_size(config, state);
  if (!std::isfinite(measurement)) {
    throw InvalidArgumentError("estimator measurement is not finite");
  }
  const Eigen::Index n = state.mean.size();
  const Eigen::Index slot = config.delay == 0 ? 0 : n - 1;
  const Eigen::VectorXd ph = state.covariance.col(slot);  // P H'
  const double innovation_var = ph[slot] + config.measurement_variance;
  const Eigen::VectorXd gain = ph / innovation_var;

  EstimatorState next;
  next.mean = state.mean + gain * (measurement - state.mean[slot]);
  Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(n, n);
  ikh.col(slot) -= gain;
  next.covariance = ikh * state.covariance * ikh.transpose() +
                    config.measurement_variance * gain * gain.transpose();
  next.covariance = 0.5 * (next.covariance + next.covariance.transpose()).eval();
  return next;
}

DelayKalmanFilter::DelayKalmanFilter(const BallParams& params, double dt, EstimatorConfig config,
                                     double initial_position, double initial_velocity)
    : model_(discretize_axis_model(params, dt)),
      config_(std::move(config)),
      state_(initial_estimator_state(config_, initial_position, initial_velocity)) {}

void DelayKalmanFilter::predict(double force) {
  state_ = phasepush::predict(model_, config_, state_, force);
}

void DelayKalmanFilter::update(double measurement) {
  state_ = phasepush::update(config_, state_, measurement);
}

}  // namespace phasepush
