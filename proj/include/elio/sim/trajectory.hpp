#pragma once

#include <cmath>

#include "elio/core/transform.hpp"

namespace elio::sim {

/// amp * sin(2 pi freq u + phase) and its first two derivatives in u.
struct Sinusoid {
  double amp = 0.0;
  double freq = 0.0;
  double phase = 0.0;

  double value(double u) const { return amp * std::sin(two_pi() * freq * u + phase); }
  double d1(double u) const {
    const double w = two_pi() * freq;
    return amp * w * std::cos(w * u + phase);
  }
  double d2(double u) const {
    const double w = two_pi() * freq;
    return -amp * w * w * std::sin(w * u + phase);
  }

 private:
  static constexpr double two_pi() { return 6.283185307179586476925286766559; }
};

/// base + rate * u + sinusoid(u).
struct ScalarPath {
  double base = 0.0;
  double rate = 0.0;
  Sinusoid wave;

  double value(double u) const { return base + rate * u + wave.value(u); }
  double d1(double u) const { return rate + wave.d1(u); }
  double d2(double u) const { return wave.d2(u); }
};

/**
 * Closed-form pose path with analytic velocity, acceleration, and body
 * angular velocity, used both to drive the simulator and as the ground-truth
 * oracle.
 *
 * Time is warped: the path holds still for `hold_time`, accelerates through a
 * quintic ramp of `ramp_time` (C2 at both ends), then advances at unit rate.
 * Translation is either a circle (optionally heading along the tangent) or a
 * per-axis sum of linear motion and one sinusoid; orientation is yaw-pitch-
 * roll (ZYX), each a ScalarPath in warped time.
 */
class AnalyticTrajectory {
 public:
  enum class Kind { kParametric, kCircle };

  Kind kind = Kind::kParametric;
  double hold_time = 0.0;
  double ramp_time = 0.0;

  // parametric translation
  Vec3 start = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Sinusoid wave_x, wave_y, wave_z;

  // circle translation
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  double angular_rate = 0.0;
  double start_angle = 0.0;
  bool yaw_follow = true;

  // orientation (ignored for yaw when yaw_follow on a circle)
  ScalarPath yaw, pitch, roll;

  RigidTransform pose(double t) const {
    const Warp w = warp(t);
    return {orientation(w), position(w)};
  }

  Vec3 translation_velocity(double t) const {
    const Warp w = warp(t);
    if (kind == Kind::kCircle) {
      const double a = angle(w.u);
      const double da = angular_rate * w.du;
      return radius * da * Vec3(-std::sin(a), std::cos(a), 0.0);
    }
    return Vec3(velocity.x() * w.du + wave_x.d1(w.u) * w.du,
                velocity.y() * w.du + wave_y.d1(w.u) * w.du,
                velocity.z() * w.du + wave_z.d1(w.u) * w.du);
  }

  Vec3 translation_acceleration(double t) const {
    const Warp w = warp(t);
    if (kind == Kind::kCircle) {
      const double a = angle(w.u);
      const double da = angular_rate * w.du;
      const double dda = angular_rate * w.ddu;
      return radius * (dda * Vec3(-std::sin(a), std::cos(a), 0.0) -
                       da * da * Vec3(std::cos(a), std::sin(a), 0.0));
    }
    auto axis = [&](double vel, const Sinusoid& s, int) {
      return vel * w.ddu + s.d2(w.u) * w.du * w.du + s.d1(w.u) * w.ddu;
    };
    return Vec3(axis(velocity.x(), wave_x, 0), axis(velocity.y(), wave_y, 1),
                axis(velocity.z(), wave_z, 2));
  }

  /// Body-frame angular velocity from the ZYX Euler rates.
  Vec3 angular_velocity_body(double t) const {
    const Warp w = warp(t);
    const Euler e = euler(w);
    const double sp = std::sin(e.pitch);
    const double cp = std::cos(e.pitch);
    const double sr = std::sin(e.roll);
    const double cr = std::cos(e.roll);
    return Vec3(e.droll - e.dyaw * sp,
                e.dpitch * cr + e.dyaw * cp * sr,
                -e.dpitch * sr + e.dyaw * cp * cr);
  }

 private:
  struct Warp {
    double u;    ///< warped time
    double du;   ///< du/dt
    double ddu;  ///< d2u/dt2
  };

  struct Euler {
    double yaw, pitch, roll;
    double dyaw, dpitch, droll;  ///< time derivatives
  };

  Warp warp(double t) const {
    const double tt = t - hold_time;
    if (tt <= 0.0) return {0.0, 0.0, 0.0};
    if (ramp_time <= 0.0) return {tt, 1.0, 0.0};
    if (tt >= ramp_time) return {0.5 * ramp_time + (tt - ramp_time), 1.0, 0.0};
    const double x = tt / ramp_time;
    const double x2 = x * x;
    const double x3 = x2 * x;
    // integral and derivatives of the quintic smoothstep 10x^3 - 15x^4 + 6x^5
    const double u = ramp_time * (2.5 * x2 * x2 - 3.0 * x2 * x3 + x3 * x3);
    const double du = 10.0 * x3 - 15.0 * x2 * x2 + 6.0 * x2 * x3;
    const double ddu = (30.0 * x2 - 60.0 * x3 + 30.0 * x2 * x2) / ramp_time;
    return {u, du, ddu};
  }

  double angle(double u) const { return start_angle + angular_rate * u; }

  Vec3 position(const Warp& w) const {
    if (kind == Kind::kCircle) {
      const double a = angle(w.u);
      return center + radius * Vec3(std::cos(a), std::sin(a), 0.0);
    }
    return start + velocity * w.u +
           Vec3(wave_x.value(w.u), wave_y.value(w.u), wave_z.value(w.u));
  }

  Euler euler(const Warp& w) const {
    Euler e{};
    if (kind == Kind::kCircle && yaw_follow) {
      e.yaw = angle(w.u) + 1.5707963267948966 + yaw.wave.value(w.u);
      e.dyaw = angular_rate * w.du + yaw.wave.d1(w.u) * w.du;
    } else {
      e.yaw = yaw.value(w.u);
      e.dyaw = yaw.d1(w.u) * w.du;
    }
    e.pitch = pitch.value(w.u);
    e.dpitch = pitch.d1(w.u) * w.du;
    e.roll = roll.value(w.u);
    e.droll = roll.d1(w.u) * w.du;
    return e;
  }

  Rot3 orientation(const Warp& w) const {
    const Euler e = euler(w);
    return Rot3::exp(e.yaw * Vec3::UnitZ()) * Rot3::exp(e.pitch * Vec3::UnitY()) *
           Rot3::exp(e.roll * Vec3::UnitX());
  }
};

}  // namespace elio::sim
