#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "elio/core/transform.hpp"
#include "elio/preprocess/scan.hpp"
#include "elio/preprocess/sensor_model.hpp"

namespace elio {

/// A point's timestamp precedes the earliest predicted state.
struct MissingStateCoverage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/**
 * Time-indexed sequence of predicted IMU poses in the global frame, filled by
 * the estimator during forward propagation and sampled during deskew.
 */
class PoseTrail {
 public:
  void clear() { samples_.clear(); }
  bool empty() const { return samples_.empty(); }

  void push(Timestamp t, const RigidTransform& pose) {
    samples_.push_back({t, pose});
  }

  /// Pose at time t, interpolated between the bracketing samples (linear in
  /// translation, geodesic in rotation). Queries past the last sample clamp
  /// to it; queries before the first throw MissingStateCoverage.
  RigidTransform pose_at(Timestamp t) const {
    if (samples_.empty()) throw MissingStateCoverage("pose trail is empty");
    if (t < samples_.front().t - 1e-9) {
      throw MissingStateCoverage("query precedes earliest predicted state");
    }
    const auto it = std::lower_bound(
        samples_.begin(), samples_.end(), t,
        [](const Sample& s, Timestamp time) { return s.t < time; });
    if (it == samples_.end()) return samples_.back().pose;
    if (it == samples_.begin()) return it->pose;
    const Sample& hi = *it;
    const Sample& lo = *std::prev(it);
    const double span = hi.t - lo.t;
    if (span <= 0.0) return hi.pose;
    const double a = (t - lo.t) / span;
    return {lo.pose.rotation.slerp(a, hi.pose.rotation),
            (1.0 - a) * lo.pose.translation + a * hi.pose.translation};
  }

 private:
  struct Sample {
    Timestamp t;
    RigidTransform pose;
  };
  std::vector<Sample> samples_;
};

/**
 * Motion-undistorts a scan to its end time t_k.
 *
 * Each point measured at t_j is remapped through
 *   p_k = T_LI * T_IG(t_k) * T_GI(t_j) * T_IL * p_j
 * using the predicted IMU poses, where T_IL is the LiDAR-to-IMU extrinsic.
 * The output is stamped entirely at t_k (all offsets set to the scan period).
 */
inline LidarScan deskew(const LidarScan& scan, const SensorModel& sensor,
                        const PoseTrail& trail, const RigidTransform& imu_from_lidar) {
  LidarScan out;
  out.stamp = scan.stamp;
  out.points.reserve(scan.points.size());

  const Timestamp scan_start = scan.stamp - sensor.scan_period;
  const RigidTransform end_inv = trail.pose_at(scan.stamp).inverse();
  const RigidTransform lidar_from_imu = imu_from_lidar.inverse();
  const RigidTransform into_end = lidar_from_imu * end_inv;

  for (const RawPoint& rp : scan.points) {
    const RigidTransform pose_j = trail.pose_at(scan_start + rp.offset);
    out.points.push_back(
        {into_end * (pose_j * (imu_from_lidar * rp.position)), sensor.scan_period});
  }
  return out;
}

}  // namespace elio
