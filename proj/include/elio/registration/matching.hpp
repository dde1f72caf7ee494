#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "elio/core/transform.hpp"
#include "elio/map/global_map.hpp"

namespace elio {

/// One scan-to-map registration constraint.
struct MatchRow {
  Vec3 scan_point = Vec3::Zero();        ///< scan point in the global frame
  std::uint32_t map_id = 0;              ///< matched map point
  Vec3 target = Vec3::Zero();            ///< projected target point
  double residual = 0.0;                 ///< z = -||p - p'||, always <= 0
  Vec3 translation_dir = Vec3::Zero();   ///< unit vector (p - p') / ||p - p'||
  Vec3 rotation_comp = Vec3::Zero();     ///< (T_IG p) x (R_IG t)
  double weight = 1.0;
  double planarity = 0.0;                ///< g_plane / ||g||_1 of the match
};

/**
 * Nearest map point to a global-frame scan point, searched within
 * max(bin_radius / (1 + iteration), map_resolution). The candidate is
 * rejected when it carries no ellipsoid or when the trajectory length
 * traveled since its capture is below the search radius (fresh map points
 * may come from clustered measurements).
 */
inline std::optional<std::uint32_t> find_match(const GlobalMap& map, const Vec3& point,
                                               int bin, int iteration, double traj_len_now) {
  const double r_search = std::max(map.bin_radius(bin) / (1.0 + iteration),
                                   map.params().resolution);
  const auto id = map.index().nearest_within_id(point, r_search);
  if (!id) return std::nullopt;
  const MapPoint& mp = map.meta(*id);
  if (!mp.ellipsoid) return std::nullopt;
  if (traj_len_now - mp.capture_traj_len < r_search) return std::nullopt;
  return id;
}

/**
 * Target point for a match: the scan point projected per geometric primitive
 * (line through the map point along v3, plane through the scan point with
 * normal v1, the map point itself for ball), blended by the L1-normalized
 * saliencies. Returns nullopt when every saliency is zero.
 */
inline std::optional<Vec3> target_point(const Vec3& scan_point, const Vec3& map_point,
                                        const Ellipsoid& e) {
  const double l1 = e.saliencies.l1();
  if (!(l1 > 0.0)) return std::nullopt;
  const Vec3 d = scan_point - map_point;
  const Vec3& v3 = e.axes[2];
  const Vec3& v1 = e.axes[0];
  const Vec3 p_line = map_point + d.dot(v3) * v3;
  const Vec3 p_plane = scan_point - d.dot(v1) * v1;
  const Vec3& p_ball = map_point;
  return (e.saliencies.line * p_line + e.saliencies.plane * p_plane +
          e.saliencies.ball * p_ball) /
         l1;
}

struct ResidualRow {
  double residual;       ///< z = -||p - p'||
  Vec3 translation_dir;  ///< t
  Vec3 rotation_comp;    ///< r
};

/**
 * Residual and measurement components of a match given the current IMU pose.
 * Matches closer than the degeneracy tolerance carry no constraint and
 * return nullopt.
 */
inline std::optional<ResidualRow> residual_row(const Vec3& scan_point, const Vec3& target,
                                               const RigidTransform& imu_pose,
                                               double tolerance = 1e-9) {
  const Vec3 e = scan_point - target;
  const double dist = e.norm();
  if (dist <= tolerance) return std::nullopt;
  const Vec3 t = e / dist;
  const Vec3 point_imu = imu_pose.inverse() * scan_point;
  const Vec3 t_imu = imu_pose.rotation.inverse() * t;
  return ResidualRow{-dist, t, point_imu.cross(t_imu)};
}

/// Drift-correcting match weight from the trajectory-length gap and the
/// alignment of the residual direction with gravity.
inline double match_weight(double traj_len_point, double traj_len_map,
                           const Vec3& translation_dir, const Vec3& gravity_dir) {
  const double denom =
      std::max(1.0 - std::abs(translation_dir.dot(gravity_dir)), 1e-4);
  return (traj_len_point - traj_len_map + 1.0) / denom;
}

}  // namespace elio
