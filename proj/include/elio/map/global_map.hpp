#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "elio/core/types.hpp"
#include "elio/preprocess/sensor_model.hpp"
#include "elio/spatial/voxel_index.hpp"
#include "elio/voting/tensor_voting.hpp"

namespace elio {

struct MapParams {
  double resolution = 0.1;  ///< map voxel size phi
  int rho_max = 6;          ///< upper limit on points per voxel
  int n_min = 6;            ///< lower bound on the neighbor minimum
  int n_max = 60;           ///< upper bound on stored neighbor sets
};

/// Per-point map metadata; positions live in the spatial index under the
/// same id. Points are immutable once inserted.
struct MapPoint {
  Timestamp capture_time = 0.0;
  double capture_traj_len = 0.0;  ///< odometer length s(t_q) at capture
  int capture_bin = 0;            ///< radial bin at capture, frozen
  std::vector<std::uint32_t> neighbor_ids;  ///< ascending ids, capped
  std::optional<Mat3> stage1;               ///< processed first-stage tensor
  std::optional<Ellipsoid> ellipsoid;
  bool queued_reprocess = false;  ///< transient flag used inside one update
};

/// Running per-bin statistics driving the adaptive neighbor minimum.
struct BinStats {
  double mean_neighbors = 0.0;
  std::uint64_t samples = 0;

  void add_sample(double count) {
    ++samples;
    mean_neighbors += (count - mean_neighbors) / static_cast<double>(samples);
  }
};

/// Points-per-voxel cap for a bin with search radius r_i:
/// min(ceil(10 * rho_max * phi^2 / (pi * r_i^2)), rho_max).
inline int per_bin_cap(double map_resolution, double search_radius, int rho_max) {
  const double raw = 10.0 * rho_max * map_resolution * map_resolution /
                     (std::numbers::pi * search_radius * search_radius);
  return std::min(static_cast<int>(std::ceil(raw)), rho_max);
}

/**
 * Global map: a voxel-capped point index plus per-point surface ellipsoids
 * maintained incrementally by two-stage tensor voting.
 *
 * Insertion happens per radial bin with a range-dependent voxel cap, and each
 * batch of newly added points is run through the ellipsoid update, which also
 * reprocesses affected existing neighbors. Reads are safe concurrently with
 * no writer; updates are single-writer.
 */
class GlobalMap {
 public:
  GlobalMap(const SensorModel& sensor, const MapParams& params)
      : sensor_(sensor), params_(params), index_(params.resolution),
        bin_stats_(sensor.max_range) {}

  const VoxelIndex& index() const { return index_; }
  const MapPoint& meta(std::uint32_t id) const { return meta_[id]; }
  const Vec3& position(std::uint32_t id) const { return index_.point(id); }
  std::size_t size() const { return meta_.size(); }
  const MapParams& params() const { return params_; }

  double bin_radius(int bin) const { return bin_search_radius(bin, sensor_); }

  /// Neighbor-count minimum for a bin: max(n_min, running mean of neighbor
  /// counts observed for points of the bin). Empty bins use n_min.
  double min_neighbors(int bin) const {
    const BinStats& s = bin_stats_[bin];
    if (s.samples == 0) return params_.n_min;
    return std::max(static_cast<double>(params_.n_min), s.mean_neighbors);
  }

  /// Neighbor-set cap for a bin: min(n_max, 2 * min_neighbors(bin)). Stored
  /// set sizes are integers, so comparisons use the floor of this value.
  double max_neighbors(int bin) const {
    return std::floor(
        std::min(static_cast<double>(params_.n_max), 2.0 * min_neighbors(bin)));
  }

  /**
   * Inserts one scan, already transformed to the global frame and split by
   * radial bin. Bins are processed in ascending order, each through the
   * capped voxel insertion with its own per-bin cap. Returns the ids of the
   * newly added points in processing order (they are contiguous).
   */
  std::vector<std::uint32_t> insert_scan(std::span<const std::vector<Vec3>> bin_points,
                                         Timestamp capture_time, double traj_len) {
    std::vector<std::uint32_t> added;
    for (int b = 0; b < static_cast<int>(bin_points.size()); ++b) {
      if (bin_points[b].empty()) continue;
      const int cap = per_bin_cap(params_.resolution, bin_radius(b), params_.rho_max);
      const auto result = index_.insert_capped(bin_points[b], cap);
      for (std::uint32_t id : result.ids) {
        meta_.push_back({capture_time, traj_len, b, {}, std::nullopt, std::nullopt});
        added.push_back(id);
      }
    }
    return added;
  }

  /**
   * Ellipsoid update over a batch of newly added points.
   *
   * For each new point: search neighbors within its bin radius, gate on the
   * bin's adaptive neighbor minimum, compute and process its first-stage
   * tensor, and push the point into qualifying neighbors' sets. Affected
   * existing neighbors are reprocessed, then second-stage tensors, saliency
   * triples, and ellipsoids are computed for the union. Points failing the
   * neighbor minimum simply carry no ellipsoid.
   */
  void ellipsoid_update(std::span<const std::uint32_t> new_ids) {
    if (new_ids.empty()) return;
    const std::uint32_t first_new = new_ids.front();

    std::vector<std::uint32_t> processing;
    processing.reserve(new_ids.size());
    std::vector<std::uint32_t> reprocess;

    for (std::uint32_t qi : new_ids) {
      MapPoint& mi = meta_[qi];
      const Vec3& pi = index_.point(qi);
      const double ri = bin_radius(mi.capture_bin);

      auto candidates = index_.radius_neighbor_ids(pi, ri);
      std::erase_if(candidates, [&](std::uint32_t id) {
        return (index_.point(id) - pi).squaredNorm() <= 0.0;  // self and coincident
      });
      const double search_count = static_cast<double>(candidates.size());

      bin_stats_[mi.capture_bin].add_sample(search_count);
      mi.neighbor_ids = cap_to_nearest(pi, std::move(candidates),
                                       max_neighbors(mi.capture_bin));

      if (search_count >= min_neighbors(mi.capture_bin)) {
        mi.stage1 = process_tensor(
            stage_one_tensor(pi, neighbor_positions(mi.neighbor_ids), ri));
        processing.push_back(qi);
      }

      for (std::uint32_t qj : mi.neighbor_ids) {
        MapPoint& mj = meta_[qj];
        const double rj = bin_radius(mj.capture_bin);
        if ((index_.point(qj) - pi).norm() > rj) continue;
        if (static_cast<double>(mj.neighbor_ids.size()) >=
            max_neighbors(mj.capture_bin)) {
          continue;
        }
        mj.neighbor_ids.push_back(qi);
        if (qj < first_new &&
            static_cast<double>(mj.neighbor_ids.size()) >=
                min_neighbors(mj.capture_bin) &&
            !mj.queued_reprocess) {
          mj.queued_reprocess = true;
          reprocess.push_back(qj);
        }
      }
    }

    std::sort(reprocess.begin(), reprocess.end());
    for (std::uint32_t qj : reprocess) {
      MapPoint& mj = meta_[qj];
      mj.queued_reprocess = false;
      bin_stats_[mj.capture_bin].add_sample(
          static_cast<double>(mj.neighbor_ids.size()));
      mj.stage1 = process_tensor(stage_one_tensor(
          index_.point(qj), neighbor_positions(mj.neighbor_ids),
          bin_radius(mj.capture_bin)));
    }

    std::vector<std::uint32_t> finalize;
    finalize.reserve(processing.size() + reprocess.size());
    std::merge(processing.begin(), processing.end(), reprocess.begin(),
               reprocess.end(), std::back_inserter(finalize));
    for (std::uint32_t qk : finalize) {
      MapPoint& mk = meta_[qk];
      stage2_positions_.clear();
      stage2_tensors_.clear();
      for (std::uint32_t qj : mk.neighbor_ids) {
        if (!meta_[qj].stage1) continue;  // unprocessed neighbors cast no vote
        stage2_positions_.push_back(index_.point(qj));
        stage2_tensors_.push_back(*meta_[qj].stage1);
      }
      if (stage2_positions_.empty()) {
        mk.ellipsoid = std::nullopt;
        continue;
      }
      const double rk = bin_radius(mk.capture_bin);
      const Mat3 j2 = stage_tensor(index_.point(qk), stage2_positions_,
                                   stage2_tensors_, rk);
      mk.ellipsoid = extract_ellipsoid(j2, rk);
    }
  }

 private:
  std::vector<Vec3> neighbor_positions(const std::vector<std::uint32_t>& ids) const {
    std::vector<Vec3> out;
    out.reserve(ids.size());
    for (std::uint32_t id : ids) out.push_back(index_.point(id));
    return out;
  }

  /// Keeps the closest `limit` ids (ties toward lower id), result ascending.
  std::vector<std::uint32_t> cap_to_nearest(const Vec3& center,
                                            std::vector<std::uint32_t> ids,
                                            double limit) const {
    const auto max_count = static_cast<std::size_t>(limit);
    if (ids.size() <= max_count) return ids;
    std::stable_sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double da = (index_.point(a) - center).squaredNorm();
      const double db = (index_.point(b) - center).squaredNorm();
      if (da != db) return da < db;
      return a < b;
    });
    ids.resize(max_count);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  SensorModel sensor_;
  MapParams params_;
  VoxelIndex index_;
  std::vector<MapPoint> meta_;
  std::vector<BinStats> bin_stats_;
  // scratch buffers for the second-stage loop
  std::vector<Vec3> stage2_positions_;
  std::vector<Mat3> stage2_tensors_;
};

}  // namespace elio
