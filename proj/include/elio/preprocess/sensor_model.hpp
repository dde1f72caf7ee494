#pragma once

#include <algorithm>
#include <cmath>

#include "elio/core/types.hpp"

namespace elio {

/// Static description of the spinning LiDAR used by the pipeline.
struct SensorModel {
  double vertical_fov = 0.7854;  ///< radians, in (0, pi]
  int scan_lines = 64;           ///< >= 2
  int max_range = 30;            ///< meters; returns at or beyond are dropped
  double scan_period = 0.1;      ///< seconds per sweep
};

/// Downsampling resolution of radial bin i: the scan-line separation at the
/// far edge of the bin, (i+1) * fov / (lines - 1).
inline double bin_resolution(int bin, const SensorModel& sensor) {
  return (bin + 1) * sensor.vertical_fov / (sensor.scan_lines - 1);
}

/// 1 m wide radial bin of a range, clamped to [0, max_range - 1].
inline int radial_bin(double range, const SensorModel& sensor) {
  const int b = static_cast<int>(std::floor(range));
  return std::clamp(b, 0, sensor.max_range - 1);
}

/// Neighborhood search radius of bin i: ten bin resolutions, at most 1 m.
inline double bin_search_radius(int bin, const SensorModel& sensor) {
  return std::min(10.0 * bin_resolution(bin, sensor), 1.0);
}

}  // namespace elio
