#pragma once

#include "elio/core/so3.hpp"
#include "elio/core/types.hpp"

namespace elio {

/// Rigid transform (rotation then translation): p -> R p + t.
struct RigidTransform {
  Rot3 rotation;
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  RigidTransform operator*(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  RigidTransform inverse() const {
    const Rot3 rinv = rotation.inverse();
    return {rinv, -(rinv * translation)};
  }
};

inline Vec3 transform_point(const RigidTransform& t, const Vec3& p) { return t * p; }

}  // namespace elio
