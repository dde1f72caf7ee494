#pragma once

#include <vector>

#include "elio/core/types.hpp"

namespace elio {

/// One LiDAR return in the sensor frame.
struct RawPoint {
  Vec3 position = Vec3::Zero();
  double offset = 0.0;  ///< seconds from scan start, in [0, scan_period]
};

/// An ordered sweep of returns, stamped at the scan end time.
struct LidarScan {
  std::vector<RawPoint> points;
  Timestamp stamp = 0.0;  ///< scan end time t_k
};

}  // namespace elio
