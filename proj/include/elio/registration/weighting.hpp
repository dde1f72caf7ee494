#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "elio/core/so3.hpp"
#include "elio/registration/matching.hpp"

namespace elio {

/// Per-axis translation/rotation observability of a match set, plus the
/// degeneracy penalty derived from it.
struct ObservabilityReport {
  Vec3 translation = Vec3::Zero();  ///< o^t, max component 1 when informative
  Vec3 rotation = Vec3::Zero();     ///< o^r
  double eta = 0.0;                 ///< min(o^t) * min(o^r)
};

/// Yaw-free rotation taking the gravity direction to -z.
inline Rot3 gravity_aligned_rotation(const Vec3& gravity_dir) {
  return Rot3(Eigen::Quaterniond::FromTwoVectors(gravity_dir, -Vec3::UnitZ()));
}

namespace detail {

/// Keeps only the maximum component of a row (ties keep all tied entries).
inline Vec3 mask_to_max(const Vec3& row) {
  const double m = row.maxCoeff();
  Vec3 out = Vec3::Zero();
  for (int d = 0; d < 3; ++d) {
    if (row[d] == m) out[d] = row[d];
  }
  return out;
}

}  // namespace detail

/**
 * Translation and rotation observability contributed by each match,
 * accumulated per axis of the gravity-aligned frame.
 *
 * Each match contributes planarity^2 * (c / max(c)) ⊙ |t^T M| to translation
 * and |(R_GI r̂)^T M| to rotation, where M maps the LiDAR frame into the
 * gravity-aligned frame and c is the per-axis scan covariance diagonal in
 * that frame. Rows are masked to their maximum component, column-summed, and
 * normalized by the largest sum. Matches with a vanishing rotation component
 * are skipped on the rotation side.
 */
inline ObservabilityReport observability(std::span<const MatchRow> rows,
                                         const Vec3& scan_cov_diag,
                                         const Rot3& rotation_world_imu,
                                         const Rot3& rotation_world_lidar,
                                         const Vec3& gravity_dir) {
  ObservabilityReport report;
  if (rows.empty()) return report;

  const Mat3 m = gravity_aligned_rotation(gravity_dir).matrix() *
                 rotation_world_lidar.matrix();
  const double cov_max = std::max(scan_cov_diag.maxCoeff(), 1e-300);
  const Vec3 cov_scale = scan_cov_diag / cov_max;
  const Mat3 r_gi = rotation_world_imu.matrix();

  Vec3 sum_t = Vec3::Zero();
  Vec3 sum_r = Vec3::Zero();
  for (const MatchRow& row : rows) {
    const Vec3 o_t = row.planarity * row.planarity *
                     cov_scale.cwiseProduct((m.transpose() * row.translation_dir).cwiseAbs());
    sum_t += detail::mask_to_max(o_t);

    const double rn = row.rotation_comp.norm();
    if (rn > 0.0) {
      const Vec3 o_r = (m.transpose() * (r_gi * (row.rotation_comp / rn))).cwiseAbs();
      sum_r += detail::mask_to_max(o_r);
    }
  }

  const double max_t = sum_t.maxCoeff();
  const double max_r = sum_r.maxCoeff();
  report.translation = max_t > 0.0 ? Vec3(sum_t / max_t) : Vec3::Zero();
  report.rotation = max_r > 0.0 ? Vec3(sum_r / max_r) : Vec3::Zero();
  report.eta = report.translation.minCoeff() * report.rotation.minCoeff();
  return report;
}

/// Penalties applied alongside eta when scaling weights.
struct WeightPenalties {
  double psi = 1.0;  ///< vertical-velocity penalty
  double mu = 1.0;   ///< mean-scan-range penalty
};

/**
 * Scales match weights in place: clamp to one (population) standard
 * deviation around the mean, shift so the minimum is exactly 1, then raise
 * elementwise to eta * psi * mu. Returns the penalties for diagnostics.
 */
inline WeightPenalties scale_weights(std::vector<double>& weights, const Vec3& velocity,
                                     const Vec3& gravity_dir, double mean_scan_range,
                                     double eta) {
  WeightPenalties p;
  p.psi = 1.0 - std::min(std::abs(velocity.dot(gravity_dir)), 1.0);
  p.mu = std::min(0.1 * mean_scan_range, 1.0);
  if (weights.empty()) return p;

  double mean = 0.0;
  for (double w : weights) mean += w;
  mean /= static_cast<double>(weights.size());
  double var = 0.0;
  for (double w : weights) var += (w - mean) * (w - mean);
  var /= static_cast<double>(weights.size());
  const double std_dev = std::sqrt(var);

  double min_w = std::numeric_limits<double>::infinity();
  for (double& w : weights) {
    w = std::clamp(w, mean - std_dev, mean + std_dev);
    min_w = std::min(min_w, w);
  }
  const double shift = 1.0 - min_w;
  const double exponent = eta * p.psi * p.mu;
  for (double& w : weights) {
    w = std::pow(w + shift, exponent);
  }
  return p;
}

}  // namespace elio
