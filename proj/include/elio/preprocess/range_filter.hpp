#pragma once

#include <cmath>
#include <vector>

#include "elio/preprocess/scan.hpp"
#include "elio/preprocess/sensor_model.hpp"
#include "elio/spatial/voxel_index.hpp"

namespace elio {

enum class FilterMode {
  kRangeAdaptive,  ///< per-bin voxel size from bin_resolution()
  kUniform,        ///< single fixed voxel size over the whole scan
};

/**
 * Downsamples a scan through range-binned voxel filtering.
 *
 * Points are partitioned into 1 m radial bins; each bin keeps the first point
 * per occupied voxel of size bin_resolution(bin). The output is the union of
 * the filtered bins, ordered by ascending bin and by input order within a
 * bin. Returns with non-finite, zero, or >= max_range distance are dropped
 * before binning.
 *
 * In uniform mode a single voxel size is used instead and the input order is
 * preserved; the same range-validity rules apply.
 */
inline LidarScan range_filter(const LidarScan& scan, const SensorModel& sensor,
                              FilterMode mode = FilterMode::kRangeAdaptive,
                              double uniform_resolution = 0.1) {
  LidarScan out;
  out.stamp = scan.stamp;

  if (mode == FilterMode::kUniform) {
    VoxelIndex index(uniform_resolution);
    for (const RawPoint& rp : scan.points) {
      const double range = rp.position.norm();
      if (!std::isfinite(range) || range <= 0.0 || range >= sensor.max_range) continue;
      if (!index.insert_capped({&rp.position, 1}, 1).ids.empty()) out.points.push_back(rp);
    }
    return out;
  }

  std::vector<std::vector<RawPoint>> bins(sensor.max_range);
  for (const RawPoint& rp : scan.points) {
    const double range = rp.position.norm();
    if (!std::isfinite(range) || range <= 0.0 || range >= sensor.max_range) continue;
    bins[radial_bin(range, sensor)].push_back(rp);
  }

  for (int b = 0; b < sensor.max_range; ++b) {
    if (bins[b].empty()) continue;
    VoxelIndex index(bin_resolution(b, sensor));
    for (const RawPoint& rp : bins[b]) {
      if (!index.insert_capped({&rp.position, 1}, 1).ids.empty()) out.points.push_back(rp);
    }
  }
  return out;
}

}  // namespace elio
