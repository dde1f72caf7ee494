#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "elio/core/types.hpp"

namespace elio {

struct VoxelKey {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    return (static_cast<std::size_t>(static_cast<std::uint32_t>(k.x)) * 73856093u) ^
           (static_cast<std::size_t>(static_cast<std::uint32_t>(k.y)) * 19349669u) ^
           (static_cast<std::size_t>(static_cast<std::uint32_t>(k.z)) * 83492791u);
  }
};

/**
 * Incremental point index over a voxel hash grid.
 *
 * Insertion is capped per voxel of size `resolution`, with the cap supplied
 * per batch: a point is stored iff its voxel holds fewer than `cap` points at
 * insertion time. Queries are exact (results match a linear scan) and are
 * accelerated by a coarser bucket grid, so the voxel resolution only governs
 * occupancy caps.
 *
 * Stored points are identified by their insertion index, which is stable for
 * the lifetime of the index. Concurrent read-only queries are safe; insertion
 * requires exclusive access.
 */
class VoxelIndex {
 public:
  explicit VoxelIndex(double resolution)
      : resolution_(resolution),
        inv_resolution_(1.0 / resolution),
        bucket_size_(std::max(resolution, 0.5)),
        inv_bucket_size_(1.0 / bucket_size_) {}

  double resolution() const { return resolution_; }
  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::uint32_t id) const { return points_[id]; }
  const std::vector<Vec3>& points() const { return points_; }

  struct InsertResult {
    std::vector<std::uint32_t> ids;              ///< ids of newly stored points
    std::vector<std::uint32_t> input_positions;  ///< matching positions in the batch
  };

  /// Inserts points whose voxel is below `cap` occupants; newly stored points
  /// are reported in input order.
  InsertResult insert_capped(std::span<const Vec3> pts, int cap) {
    InsertResult result;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
      const Vec3& p = pts[i];
      int& count = occupancy_[voxel_of(p)];
      if (count >= cap) continue;
      ++count;
      const auto id = static_cast<std::uint32_t>(points_.size());
      points_.push_back(p);
      buckets_[bucket_of(p)].push_back(id);
      result.ids.push_back(id);
      result.input_positions.push_back(i);
    }
    return result;
  }

  /// Ids of all stored points with ||q - p|| <= r, ascending by insertion id.
  std::vector<std::uint32_t> radius_neighbor_ids(const Vec3& q, double r) const {
    std::vector<std::uint32_t> out;
    const double r2 = r * r;
    for_each_candidate(q, r, [&](std::uint32_t id) {
      if ((points_[id] - q).squaredNorm() <= r2) out.push_back(id);
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Vec3> radius_neighbors(const Vec3& q, double r) const {
    std::vector<Vec3> out;
    for (std::uint32_t id : radius_neighbor_ids(q, r)) out.push_back(points_[id]);
    return out;
  }

  /// Id of the closest stored point within r; distance ties break toward the
  /// lowest insertion id.
  std::optional<std::uint32_t> nearest_within_id(const Vec3& q, double r) const {
    const double r2 = r * r;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    bool found = false;
    for_each_candidate(q, r, [&](std::uint32_t id) {
      const double d2 = (points_[id] - q).squaredNorm();
      if (d2 > r2) return;
      if (!found || d2 < best_d2 || (d2 == best_d2 && id < best_id)) {
        best_d2 = d2;
        best_id = id;
        found = true;
      }
    });
    if (!found) return std::nullopt;
    return best_id;
  }

  std::optional<Vec3> nearest_within(const Vec3& q, double r) const {
    const auto id = nearest_within_id(q, r);
    if (!id) return std::nullopt;
    return points_[*id];
  }

 private:
  static std::int32_t coord(double v, double inv_size) {
    return static_cast<std::int32_t>(std::floor(v * inv_size));
  }

  VoxelKey voxel_of(const Vec3& p) const {
    return {coord(p.x(), inv_resolution_), coord(p.y(), inv_resolution_),
            coord(p.z(), inv_resolution_)};
  }

  VoxelKey bucket_of(const Vec3& p) const {
    return {coord(p.x(), inv_bucket_size_), coord(p.y(), inv_bucket_size_),
            coord(p.z(), inv_bucket_size_)};
  }

  template <typename Fn>
  void for_each_candidate(const Vec3& q, double r, Fn&& fn) const {
    const VoxelKey lo = bucket_of(q - Vec3::Constant(r));
    const VoxelKey hi = bucket_of(q + Vec3::Constant(r));
    for (std::int32_t x = lo.x; x <= hi.x; ++x) {
      for (std::int32_t y = lo.y; y <= hi.y; ++y) {
        for (std::int32_t z = lo.z; z <= hi.z; ++z) {
          const auto it = buckets_.find({x, y, z});
          if (it == buckets_.end()) continue;
          for (std::uint32_t id : it->second) fn(id);
        }
      }
    }
  }

  double resolution_;
  double inv_resolution_;
  double bucket_size_;
  double inv_bucket_size_;
  std::vector<Vec3> points_;
  std::unordered_map<VoxelKey, int, VoxelKeyHash> occupancy_;
  std::unordered_map<VoxelKey, std::vector<std::uint32_t>, VoxelKeyHash> buckets_;
};

}  // namespace elio
