#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bytetrack/kalman.hpp"

using namespace bytetrack;

namespace {

double asymmetry(const StateMatrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

MeasurementVector measurement(double cx, double cy, double a, double h) {
  return MeasurementVector(cx, cy, a, h);
}

}  // namespace

TEST(Kalman, InitiateUsesHeightScaledStds) {
  const KalmanFilter kf;
  const MotionState s = kf.initiate(measurement(100, 200, 0.5, 80));
  EXPECT_EQ(s.mean.head<4>(), measurement(100, 200, 0.5, 80));
  EXPECT_TRUE(s.mean.tail<4>().isZero());
  EXPECT_NEAR(std::sqrt(s.cov(0, 0)), 2.0 * 80.0 / 20.0, 1e-12);
  EXPECT_NEAR(std::sqrt(s.cov(4, 4)), 10.0 * 80.0 / 160.0, 1e-12);
  EXPECT_NEAR(std::sqrt(s.cov(2, 2)), 1e-2, 1e-15);
  EXPECT_NEAR(std::sqrt(s.cov(6, 6)), 1e-5, 1e-18);
}

TEST(Kalman, InitiateRejectsNonPositiveHeight) {
  const KalmanFilter kf;
  EXPECT_THROW(kf.initiate(measurement(0, 0, 0.5, 0)), std::invalid_argument);
}

TEST(Kalman, PredictAdvancesByVelocity) {
  const KalmanFilter kf;
  MotionState s = kf.initiate(measurement(10, 20, 0.5, 50));
  s.mean.tail<4>() << 2, -3, 0, 1;
  const MotionState p = kf.predict(s);
  EXPECT_NEAR(p.mean[0], 12, 1e-12);
  EXPECT_NEAR(p.mean[1], 17, 1e-12);
  EXPECT_NEAR(p.mean[3], 51, 1e-12);
}

TEST(Kalman, CovarianceStaysSymmetric) {
  const KalmanFilter kf;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0, 1000);
  std::uniform_real_distribution<double> height(20, 300);
  std::uniform_real_distribution<double> aspect(0.2, 1.0);
  std::bernoulli_distribution do_update(0.6);
  for (int seq = 0; seq < 1000; ++seq) {
    MotionState s = kf.initiate(measurement(pos(rng), pos(rng), aspect(rng), height(rng)));
    for (int step = 0; step < 20; ++step) {
      s = do_update(rng) ? kf.update(kf.predict(s),
                                     measurement(pos(rng), pos(rng), aspect(rng), height(rng)))
                         : kf.predict(s);
      ASSERT_LE(asymmetry(s.cov), 1e-9);
    }
  }
}

TEST(Kalman, ZeroInnovationKeepsMean) {
  const KalmanFilter kf;
  MotionState s = kf.predict(kf.initiate(measurement(300, 400, 0.4, 120)));
  s.mean.tail<4>() << 1.5, -0.5, 0, 0.2;
  const MotionState u = kf.update(s, s.mean.head<4>());
  EXPECT_LE((u.mean - s.mean).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Kalman, UpdateShrinksTrace) {
  const KalmanFilter kf;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> jitter(-5, 5);
  MotionState s = kf.initiate(measurement(100, 100, 0.5, 100));
  for (int k = 0; k < 50; ++k) {
    const MotionState pred = kf.predict(s);
    const MotionState upd =
        kf.update(pred, measurement(100 + jitter(rng), 100 + jitter(rng), 0.5, 100));
    ASSERT_LT(upd.cov.trace(), pred.cov.trace());
    s = upd;
  }
}

TEST(Kalman, PredictInflatesPositionVariance) {
  const KalmanFilter kf;
  MotionState s = kf.initiate(measurement(100, 100, 0.5, 100));
  const StateMatrix& f = KalmanFilter::transition();
  for (int k = 0; k < 30; ++k) {
    const MotionState p = kf.predict(s);
    const StateMatrix propagated = f * s.cov * f.transpose();
    for (int i = 0; i < 8; ++i) ASSERT_GE(p.cov(i, i), propagated(i, i));
    for (int i : {0, 1, 3}) ASSERT_GT(p.cov(i, i), s.cov(i, i));
    s = p;
  }
}

TEST(Kalman, ConvergesToFixedMeasurement) {
  const KalmanFilter kf;
  const MeasurementVector z = measurement(640, 360, 0.45, 150);
  MotionState s = kf.initiate(measurement(600, 380, 0.5, 140));
  for (int k = 0; k < 100; ++k) s = kf.update(kf.predict(s), z);
  EXPECT_LE((s.mean.head<4>() - z).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Kalman, TracksConstantVelocity) {
  // Speeds span the synthetic generator's default range of 1-4 px/frame.
  const KalmanFilter kf;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> speed(1.0, 4.0);
  std::uniform_real_distribution<double> heading(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> height(40.0, 300.0);
  for (int run = 0; run < 200; ++run) {
    const double v = speed(rng), th = heading(rng), h = height(rng);
    const double vx = v * std::cos(th), vy = v * std::sin(th);
    auto truth = [&](int t) { return measurement(500 + vx * t, 500 + vy * t, 0.41, h); };
    MotionState s = kf.initiate(truth(1));
    for (int t = 2; t <= 60; ++t) {
      const MotionState pred = kf.predict(s);
      if (t > 10) {
        const double err = std::hypot(pred.mean[0] - truth(t)[0], pred.mean[1] - truth(t)[1]);
        ASSERT_LT(err, 0.5) << "speed " << v << " frame " << t;
      }
      s = kf.update(pred, truth(t));
    }
  }
}

TEST(Kalman, UpdateRejectsDegenerateCovariance) {
  const KalmanFilter kf;
  MotionState s;
  s.mean << 0, 0, 0.5, 10, 0, 0, 0, 0;
  s.cov = StateMatrix::Zero();
  s.cov(0, 0) = -1e6;  // not a covariance
  EXPECT_THROW(kf.update(s, measurement(0, 0, 0.5, 10)), KalmanError);
}
