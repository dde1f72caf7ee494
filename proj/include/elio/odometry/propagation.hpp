#pragma once

#include "elio/odometry/state.hpp"

namespace elio {

/// Continuous-time process noise densities.
struct ProcessNoise {
  double gyro = 2e-4;          ///< rad/s/sqrt(Hz)
  double accel = 2e-3;         ///< m/s^2/sqrt(Hz)
  double gyro_bias_walk = 1e-5;
  double accel_bias_walk = 1e-4;
};

/**
 * Forward-propagates the state and covariance by one IMU sample held over dt:
 * position integrates the previous velocity, the rotation composes the
 * unbiased rate, and velocity integrates the rotated unbiased acceleration
 * plus gravity. Biases and gravity are constant. The covariance follows the
 * first-order linearized transition.
 */
inline void propagate(NavState& x, Cov18& cov, const ImuSample& u, double dt,
                      const ProcessNoise& noise) {
  if (dt <= 0.0) return;

  const Vec3 omega = u.angular_rate - x.gyro_bias;
  const Vec3 accel = u.linear_accel - x.accel_bias;
  const Mat3 r_old = x.rotation.matrix();

  Cov18 f = Cov18::Identity();
  f.block<3, 3>(kIdxPos, kIdxVel) = dt * Mat3::Identity();
  f.block<3, 3>(kIdxRot, kIdxRot) = Rot3::exp(-omega * dt).matrix();
  f.block<3, 3>(kIdxRot, kIdxBg) = -dt * Mat3::Identity();
  f.block<3, 3>(kIdxVel, kIdxRot) = -r_old * skew(accel) * dt;
  f.block<3, 3>(kIdxVel, kIdxBa) = -r_old * dt;
  f.block<3, 3>(kIdxVel, kIdxGrav) = dt * Mat3::Identity();

  x.translation += x.velocity * dt;
  x.rotation = x.rotation * Rot3::exp(omega * dt);
  x.velocity += (x.rotation * accel + x.gravity) * dt;

  cov = f * cov * f.transpose();
  const double gyro_var = noise.gyro * noise.gyro * dt;
  const double accel_var = noise.accel * noise.accel * dt;
  const double bg_var = noise.gyro_bias_walk * noise.gyro_bias_walk * dt;
  const double ba_var = noise.accel_bias_walk * noise.accel_bias_walk * dt;
  cov.block<3, 3>(kIdxRot, kIdxRot) += gyro_var * Mat3::Identity();
  cov.block<3, 3>(kIdxVel, kIdxVel) += accel_var * Mat3::Identity();
  cov.block<3, 3>(kIdxBa, kIdxBa) += ba_var * Mat3::Identity();
  cov.block<3, 3>(kIdxBg, kIdxBg) += bg_var * Mat3::Identity();
  cov = 0.5 * (cov + cov.transpose()).eval();
}

}  // namespace elio
