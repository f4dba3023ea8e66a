#pragma once

#include <stdexcept>

#include <Eigen/Core>

namespace bytetrack {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateMatrix = Eigen::Matrix<double, 8, 8>;
using MeasurementVector = Eigen::Vector4d;
using MeasurementMatrix = Eigen::Matrix4d;

/// Gaussian belief over (cx, cy, a, h, vcx, vcy, va, vh); velocities are per frame.
struct MotionState {
  StateVector mean = StateVector::Zero();
  StateMatrix cov = StateMatrix::Identity();
};

struct ProjectedState {
  MeasurementVector mean;
  MeasurementMatrix cov;
};

/// Noise parameters. Position-like stds are `pos_weight * h`, velocity-like
/// stds are `vel_weight * h`; the aspect-ratio component uses the constant
/// stds below because it is dimensionless.
struct KalmanConfig {
  double pos_weight = 1.0 / 20.0;
  double vel_weight = 1.0 / 160.0;
  double aspect_std = 1e-2;
  double aspect_vel_std = 1e-5;
  double aspect_measurement_std = 1e-1;
  double init_pos_scale = 2.0;
  double init_vel_scale = 10.0;
};

class KalmanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constant-velocity Kalman filter in cxcyah measurement space with dt = 1 frame.
/// Stateless apart from its configuration; every operation returns a new state.
class KalmanFilter {
 public:
  explicit KalmanFilter(KalmanConfig cfg = {});

  /// Zero velocities, covariance from the measurement's height.
  /// Throws std::invalid_argument when the height is not positive.
  MotionState initiate(const MeasurementVector& measurement) const;

  MotionState predict(const MotionState& s) const;

  ProjectedState project(const MotionState& s) const;

  /// Throws KalmanError if the innovation covariance cannot be factored.
  MotionState update(const MotionState& s, const MeasurementVector& measurement) const;

  /// Process noise Q evaluated at the state's current height.
  StateMatrix process_noise(const MotionState& s) const;
  /// Measurement noise R evaluated at the state's current height.
  MeasurementMatrix measurement_noise(const MotionState& s) const;

  static const StateMatrix& transition();

  const KalmanConfig& config() const { return cfg_; }

 private:
  KalmanConfig cfg_;
};

}  // namespace bytetrack
