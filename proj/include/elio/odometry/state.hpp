#pragma once

#include <cmath>

#include "elio/core/transform.hpp"

namespace elio {

/// Full estimator state: IMU pose, velocity, sensor biases, and gravity.
struct NavState {
  Vec3 translation = Vec3::Zero();  ///< position of the IMU in the global frame
  Rot3 rotation;                    ///< global-from-IMU rotation
  Vec3 velocity = Vec3::Zero();
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);

  RigidTransform pose() const { return {rotation, translation}; }

  bool finite() const {
    return translation.allFinite() && velocity.allFinite() &&
           accel_bias.allFinite() && gyro_bias.allFinite() && gravity.allFinite() &&
           rotation.quaternion().coeffs().allFinite();
  }
};

// Error-state ordering: [d_translation, d_theta, d_velocity, d_accel_bias,
// d_gyro_bias, d_gravity], 3 each.
inline constexpr int kStateDim = 18;
inline constexpr int kIdxPos = 0;
inline constexpr int kIdxRot = 3;
inline constexpr int kIdxVel = 6;
inline constexpr int kIdxBa = 9;
inline constexpr int kIdxBg = 12;
inline constexpr int kIdxGrav = 15;

using Cov18 = Eigen::Matrix<double, kStateDim, kStateDim>;
using Vec18 = Eigen::Matrix<double, kStateDim, 1>;

/// Applies an error-state increment; rotation composes on the right.
inline NavState boxplus(const NavState& x, const Vec18& d) {
  NavState out = x;
  out.translation += d.segment<3>(kIdxPos);
  out.rotation = x.rotation * Rot3::exp(d.segment<3>(kIdxRot));
  out.velocity += d.segment<3>(kIdxVel);
  out.accel_bias += d.segment<3>(kIdxBa);
  out.gyro_bias += d.segment<3>(kIdxBg);
  out.gravity += d.segment<3>(kIdxGrav);
  return out;
}

/// Error of a relative to b: a = boxplus(b, boxminus(a, b)).
inline Vec18 boxminus(const NavState& a, const NavState& b) {
  Vec18 d;
  d.segment<3>(kIdxPos) = a.translation - b.translation;
  d.segment<3>(kIdxRot) = (b.rotation.inverse() * a.rotation).log();
  d.segment<3>(kIdxVel) = a.velocity - b.velocity;
  d.segment<3>(kIdxBa) = a.accel_bias - b.accel_bias;
  d.segment<3>(kIdxBg) = a.gyro_bias - b.gyro_bias;
  d.segment<3>(kIdxGrav) = a.gravity - b.gravity;
  return d;
}

/// One IMU measurement.
struct ImuSample {
  Timestamp stamp = 0.0;
  Vec3 angular_rate = Vec3::Zero();  ///< rad/s, body frame
  Vec3 linear_accel = Vec3::Zero();  ///< m/s^2, body frame specific force
};

/// Cumulative trajectory length s(t) over the estimated path.
class TrajectoryOdometer {
 public:
  double length() const { return length_; }

  /// Accumulates the translation increment to the given position.
  void advance_to(const Vec3& position) {
    if (has_last_) length_ += (position - last_).norm();
    last_ = position;
    has_last_ = true;
  }

 private:
  double length_ = 0.0;
  Vec3 last_ = Vec3::Zero();
  bool has_last_ = false;
};

}  // namespace elio
