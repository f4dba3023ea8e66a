#include "bytetrack/kalman.hpp"

#include <Eigen/Cholesky>

namespace bytetrack {

namespace {

StateMatrix make_transition() {
  StateMatrix f = StateMatrix::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

// Restores exact symmetry lost to rounding in the matrix products.
template <typename M>
M symmetrized(const M& m) {
  return (m + m.transpose()) * 0.5;
}

}  // namespace

KalmanFilter::KalmanFilter(KalmanConfig cfg) : cfg_(cfg) {}

const StateMatrix& KalmanFilter::transition() {
  static const StateMatrix f = make_transition();
  return f;
}

MotionState KalmanFilter::initiate(const MeasurementVector& measurement) const {
  const double h = measurement[3];
  if (!(h > 0.0)) throw std::invalid_argument("KalmanFilter::initiate: height must be positive");

  MotionState s;
  s.mean.head<4>() = measurement;
  s.mean.tail<4>().setZero();

  const double p = cfg_.init_pos_scale * cfg_.pos_weight * h;
  const double v = cfg_.init_vel_scale * cfg_.vel_weight * h;
  StateVector std;
  std << p, p, cfg_.aspect_std, p, v, v, cfg_.aspect_vel_std, v;
  s.cov = std.array().square().matrix().asDiagonal();
  return s;
}

StateMatrix KalmanFilter::process_noise(const MotionState& s) const {
  const double h = s.mean[3];
  const double p = cfg_.pos_weight * h;
  const double v = cfg_.vel_weight * h;
  StateVector std;
  std << p, p, cfg_.aspect_std, p, v, v, cfg_.aspect_vel_std, v;
  return std.array().square().matrix().asDiagonal();
}

MeasurementMatrix KalmanFilter::measurement_noise(const MotionState& s) const {
  const double p = cfg_.pos_weight * s.mean[3];
  MeasurementVector std(p, p, cfg_.aspect_measurement_std, p);
  return std.array().square().matrix().asDiagonal();
}

MotionState KalmanFilter::predict(const MotionState& s) const {
  const StateMatrix& f = transition();
  MotionState out;
  out.mean = f * s.mean;
  out.cov = symmetrized(StateMatrix(f * s.cov * f.transpose() + process_noise(s)));
  return out;
}

ProjectedState KalmanFilter::project(const MotionState& s) const {
  ProjectedState p;
  p.mean = s.mean.head<4>();
  p.cov = symmetrized(MeasurementMatrix(s.cov.topLeftCorner<4, 4>() + measurement_noise(s)));
  return p;
}

MotionState KalmanFilter::update(const MotionState& s, const MeasurementVector& measurement) const {
  const ProjectedState proj = project(s);
  Eigen::LLT<MeasurementMatrix> llt(proj.cov);
  if (llt.info() != Eigen::Success) {
    throw KalmanError("KalmanFilter::update: innovation covariance is not positive-definite");
  }

  // K = P Hᵀ S⁻¹, with P Hᵀ the left 8x4 block of P.
  const Eigen::Matrix<double, 8, 4> pht = s.cov.leftCols<4>();
  const Eigen::Matrix<double, 4, 8> kt = llt.solve(pht.transpose());
  const Eigen::Matrix<double, 8, 4> gain = kt.transpose();

  MotionState out;
  out.mean = s.mean + gain * (measurement - proj.mean);
  out.cov = symmetrized(StateMatrix(s.cov - gain * proj.cov * gain.transpose()));
  return out;
}

}  // namespace bytetrack
