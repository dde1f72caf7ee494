#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "elio/core/types.hpp"

namespace elio::sim {

struct Box {
  Vec3 center = Vec3::Zero();
  Vec3 half_size = Vec3::Ones();  ///< half extents along x, y, z
};

struct Plane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
};

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Infinite cylinder around the line through `base` along `axis`.
struct Cylinder {
  Vec3 base = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double radius = 1.0;
};

using Primitive = std::variant<Box, Plane, Sphere, Cylinder>;

namespace detail {

constexpr double kRayEps = 1e-6;

inline std::optional<double> ray_hit(const Box& b, const Vec3& o, const Vec3& d) {
  // Slab test; surfaces are double-sided, so a ray starting inside hits the
  // exit face.
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double lo = b.center[k] - b.half_size[k];
    const double hi = b.center[k] + b.half_size[k];
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] < lo || o[k] > hi) return std::nullopt;
      continue;
    }
    double a = (lo - o[k]) / d[k];
    double c = (hi - o[k]) / d[k];
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
    if (t0 > t1) return std::nullopt;
  }
  if (t0 > kRayEps) return t0;
  if (t1 > kRayEps) return t1;
  return std::nullopt;
}

inline std::optional<double> ray_hit(const Plane& p, const Vec3& o, const Vec3& d) {
  const double denom = p.normal.dot(d);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = p.normal.dot(p.point - o) / denom;
  if (t > kRayEps) return t;
  return std::nullopt;
}

inline std::optional<double> ray_hit(const Sphere& s, const Vec3& o, const Vec3& d) {
  const Vec3 oc = o - s.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double t_near = -b - root;
  if (t_near > kRayEps) return t_near;
  const double t_far = -b + root;
  if (t_far > kRayEps) return t_far;
  return std::nullopt;
}

inline std::optional<double> ray_hit(const Cylinder& cy, const Vec3& o, const Vec3& d) {
  const Vec3 axis = cy.axis.normalized();
  const Vec3 oc = o - cy.base;
  const Vec3 d_perp = d - d.dot(axis) * axis;
  const Vec3 oc_perp = oc - oc.dot(axis) * axis;
  const double a = d_perp.squaredNorm();
  if (a < 1e-15) return std::nullopt;
  const double b = oc_perp.dot(d_perp);
  const double c = oc_perp.squaredNorm() - cy.radius * cy.radius;
  const double disc = b * b - a * c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double t_near = (-b - root) / a;
  if (t_near > kRayEps) return t_near;
  const double t_far = (-b + root) / a;
  if (t_far > kRayEps) return t_far;
  return std::nullopt;
}

inline double surface_distance(const Box& b, const Vec3& p) {
  const Vec3 q = (p - b.center).cwiseAbs() - b.half_size;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return std::abs(outside + inside);
}

inline double surface_distance(const Plane& pl, const Vec3& p) {
  return std::abs(pl.normal.normalized().dot(p - pl.point));
}

inline double surface_distance(const Sphere& s, const Vec3& p) {
  return std::abs((p - s.center).norm() - s.radius);
}

inline double surface_distance(const Cylinder& c, const Vec3& p) {
  const Vec3 axis = c.axis.normalized();
  const Vec3 rel = p - c.base;
  return std::abs((rel - rel.dot(axis) * axis).norm() - c.radius);
}

}  // namespace detail

/// A world of analytic primitives used to synthesize scans and to verify
/// that points lie on surfaces.
class Scene {
 public:
  void add(const Primitive& p) { primitives_.push_back(p); }
  const std::vector<Primitive>& primitives() const { return primitives_; }
  bool empty() const { return primitives_.empty(); }

  /// Range to the nearest surface along a unit-direction ray, if any.
  std::optional<double> raycast(const Vec3& origin, const Vec3& dir) const {
    std::optional<double> best;
    for (const Primitive& prim : primitives_) {
      const auto t = std::visit(
          [&](const auto& p) { return detail::ray_hit(p, origin, dir); }, prim);
      if (t && (!best || *t < *best)) best = t;
    }
    return best;
  }

  /// Distance from a point to the closest primitive surface.
  double surface_distance(const Vec3& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Primitive& prim : primitives_) {
      best = std::min(best, std::visit([&](const auto& g) {
                        return detail::surface_distance(g, p);
                      }, prim));
    }
    return best;
  }

  /// Diameter of the bounding box over the finite primitives (planes are
  /// unbounded and ignored); 100 m when nothing bounds the scene.
  double diameter() const {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    bool bounded = false;
    for (const Primitive& prim : primitives_) {
      if (const auto* b = std::get_if<Box>(&prim)) {
        lo = lo.cwiseMin(b->center - b->half_size);
        hi = hi.cwiseMax(b->center + b->half_size);
        bounded = true;
      } else if (const auto* s = std::get_if<Sphere>(&prim)) {
        lo = lo.cwiseMin(s->center - Vec3::Constant(s->radius));
        hi = hi.cwiseMax(s->center + Vec3::Constant(s->radius));
        bounded = true;
      } else if (const auto* c = std::get_if<Cylinder>(&prim)) {
        lo = lo.cwiseMin(c->base - Vec3::Constant(c->radius));
        hi = hi.cwiseMax(c->base + Vec3::Constant(c->radius));
        bounded = true;
      }
    }
    if (!bounded) return 100.0;
    return (hi - lo).norm();
  }

 private:
  std::vector<Primitive> primitives_;
};

}  // namespace elio::sim
