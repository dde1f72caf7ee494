#pragma once

#include <span>
#include <stdexcept>

#include "elio/odometry/state.hpp"

namespace elio {

/// The initialization window was not quasi-static.
struct NotStatic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GravityInit {
  Vec3 gravity = Vec3::Zero();    ///< global gravity (body frame at rest)
  Vec3 gyro_bias = Vec3::Zero();  ///< mean angular rate
  Vec3 accel_bias = Vec3::Zero(); ///< left at zero; unobservable here
};

/**
 * Estimates gravity and the gyro bias from a quasi-static sample window:
 * gravity is -9.81 along the mean measured acceleration. Throws NotStatic
 * when fewer than min_samples are given or the acceleration variance
 * (mean squared deviation, (m/s^2)^2) exceeds the threshold.
 */
inline GravityInit initialize_gravity(std::span<const ImuSample> samples,
                                      int min_samples = 20,
                                      double max_accel_variance = 0.05) {
  if (static_cast<int>(samples.size()) < min_samples) {
    throw NotStatic("too few IMU samples for gravity initialization");
  }
  Vec3 mean_accel = Vec3::Zero();
  Vec3 mean_rate = Vec3::Zero();
  for (const ImuSample& s : samples) {
    mean_accel += s.linear_accel;
    mean_rate += s.angular_rate;
  }
  mean_accel /= static_cast<double>(samples.size());
  mean_rate /= static_cast<double>(samples.size());

  double variance = 0.0;
  for (const ImuSample& s : samples) {
    variance += (s.linear_accel - mean_accel).squaredNorm();
  }
  variance /= static_cast<double>(samples.size());
  if (variance > max_accel_variance) {
    throw NotStatic("IMU acceleration variance too high for initialization");
  }
  const double norm = mean_accel.norm();
  if (!(norm > 1e-6)) {
    throw NotStatic("mean acceleration vanishes; cannot orient gravity");
  }
  return {-9.81 * mean_accel / norm, mean_rate, Vec3::Zero()};
}

}  // namespace elio
