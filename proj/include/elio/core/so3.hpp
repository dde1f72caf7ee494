#pragma once

#include <cmath>

#include <Eigen/Geometry>

#include "elio/core/types.hpp"

namespace elio {

/**
 * Rotation in SO(3), stored as a unit quaternion.
 *
 * Immutable value type. The exponential/log maps use series expansions near
 * zero and the atan2-based branch near pi so the round trip is stable on the
 * whole open ball of radius pi.
 */
class Rot3 {
 public:
  Rot3() : q_(Eigen::Quaterniond::Identity()) {}
  explicit Rot3(const Eigen::Quaterniond& q) : q_(q.normalized()) {}
  explicit Rot3(const Mat3& m) : q_(m) { q_.normalize(); }

  static Rot3 identity() { return Rot3(); }

  /// Rodrigues exponential of an axis-angle vector (radians).
  static Rot3 exp(const Vec3& axis_angle) {
    const double theta2 = axis_angle.squaredNorm();
    const double theta = std::sqrt(theta2);
    double half_sinc;  // sin(theta/2) / theta
    double cos_half;
    if (theta < 1e-6) {
      half_sinc = 0.5 - theta2 / 48.0 + theta2 * theta2 / 3840.0;
      cos_half = 1.0 - theta2 / 8.0 + theta2 * theta2 / 384.0;
    } else {
      half_sinc = std::sin(0.5 * theta) / theta;
      cos_half = std::cos(0.5 * theta);
    }
    Eigen::Quaterniond q;
    q.w() = cos_half;
    q.vec() = half_sinc * axis_angle;
    return Rot3(q);
  }

  /// Axis-angle vector; inverse of exp() for angles below pi.
  Vec3 log() const {
    Eigen::Quaterniond q = q_;
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();  // angle in [0, pi]
    const double vn = q.vec().norm();
    if (vn < 1e-9) {
      // theta/sin(theta/2) ~ 2 + vn^2/(3 w^2) for small angles
      return (2.0 / q.w()) * (1.0 + vn * vn / (3.0 * q.w() * q.w())) * q.vec();
    }
    const double angle = 2.0 * std::atan2(vn, q.w());
    return (angle / vn) * q.vec();
  }

  Mat3 matrix() const { return q_.toRotationMatrix(); }
  const Eigen::Quaterniond& quaternion() const { return q_; }

  Rot3 inverse() const { return Rot3(q_.conjugate()); }

  Rot3 operator*(const Rot3& other) const { return Rot3(q_ * other.q_); }
  Vec3 operator*(const Vec3& v) const { return q_ * v; }

  /// Geodesic interpolation from *this (t=0) to other (t=1).
  Rot3 slerp(double t, const Rot3& other) const {
    return Rot3(q_.slerp(t, other.q_));
  }

  double angle_to(const Rot3& other) const {
    return (inverse() * other).log().norm();
  }

 private:
  Eigen::Quaterniond q_;
};

inline Rot3 rot_exp(const Vec3& axis_angle) { return Rot3::exp(axis_angle); }
inline Vec3 rot_log(const Rot3& r) { return r.log(); }

}  // namespace elio
