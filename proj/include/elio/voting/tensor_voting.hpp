#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "elio/core/types.hpp"

namespace elio {

/// A voting neighborhood contained a point coincident with the center.
struct DegenerateNeighborhood : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Eigen pairs of a symmetric 3x3 tensor, eigenvalues descending. Eigenvector
/// signs follow a fixed convention (largest-magnitude component positive) so
/// degenerate spectra cannot produce run-to-run nondeterminism.
struct SymEigen3 {
  std::array<double, 3> values{};  ///< values[0] >= values[1] >= values[2]
  Mat3 vectors;                    ///< columns match values
};

inline SymEigen3 eigen_sym3(const Mat3& tensor) {
  Eigen::SelfAdjointEigenSolver<Mat3> solver(tensor);
  SymEigen3 out;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = solver.eigenvalues()(2 - k);
    Vec3 v = solver.eigenvectors().col(2 - k);
    int arg = 0;
    for (int d = 1; d < 3; ++d) {
      if (std::abs(v[d]) > std::abs(v[arg])) arg = d;
    }
    if (v[arg] < 0.0) v = -v;
    out.vectors.col(k) = v;
  }
  return out;
}

/// Line/plane/ball saliency triple.
struct Saliencies {
  double line = 0.0;
  double plane = 0.0;
  double ball = 0.0;
  double l1() const { return line + plane + ball; }
};

enum class Primitive { kLine, kPlane, kBall };

/// Most salient primitive; ties resolve in line, plane, ball order.
inline Primitive dominant_primitive(const Saliencies& g) {
  if (g.line >= g.plane && g.line >= g.ball) return Primitive::kLine;
  if (g.plane >= g.ball) return Primitive::kPlane;
  return Primitive::kBall;
}

/**
 * Local surface ellipsoid: orthonormal axes with magnitudes sorted ascending.
 * axes[0] pairs with magnitudes[0] and approximates the surface normal;
 * axes[2] pairs with magnitudes[2], the direction of dominant variation.
 * The magnitudes sum to the search radius the tensor was accumulated with.
 */
struct Ellipsoid {
  std::array<Vec3, 3> axes;
  Vec3 magnitudes = Vec3::Zero();
  Saliencies saliencies;
};

namespace detail {

/// One tensor vote c * U * K * U' with U = I - 2uu^T, U' = (I - uu^T/2) U^T.
template <typename TensorOf>
Mat3 vote_sum(const Vec3& center, std::span<const Vec3> neighbors, double radius,
              TensorOf&& tensor_of) {
  if (neighbors.empty()) {
    throw DegenerateNeighborhood("tensor vote requires at least one neighbor");
  }
  Mat3 sum = Mat3::Zero();
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    const Vec3 d = center - neighbors[j];
    const double d2 = d.squaredNorm();
    if (d2 <= 0.0) {
      throw DegenerateNeighborhood("neighbor coincides with the voting center");
    }
    const Vec3 u = d / std::sqrt(d2);
    const double c = std::exp(-d2 / radius);
    const Mat3 uu = u * u.transpose();
    const Mat3 reflect = Mat3::Identity() - 2.0 * uu;
    const Mat3 taper = Mat3::Identity() - 0.5 * uu;
    sum.noalias() += c * (reflect * tensor_of(j) * (taper * reflect));
  }
  // Individual votes are asymmetric when a voter's stick axis is not
  // orthogonal to u; the accumulated tensor is kept symmetric explicitly.
  return 0.5 * (sum + sum.transpose());
}

}  // namespace detail

/// First-stage tensor: every neighbor votes with the identity tensor.
inline Mat3 stage_one_tensor(const Vec3& center, std::span<const Vec3> neighbors,
                             double radius) {
  return detail::vote_sum(center, neighbors, radius,
                          [](std::size_t) { return Mat3::Identity(); });
}

/// Generic staged tensor: neighbor j votes with its processed prior tensor.
inline Mat3 stage_tensor(const Vec3& center, std::span<const Vec3> neighbors,
                         std::span<const Mat3> neighbor_tensors, double radius) {
  return detail::vote_sum(center, neighbors, radius,
                          [&](std::size_t j) -> const Mat3& { return neighbor_tensors[j]; });
}

/// Keeps the stick and plate component votes of a first-stage tensor and
/// discards the isotropic (ball) part.
inline Mat3 process_tensor(const Mat3& j1) {
  const SymEigen3 e = eigen_sym3(j1);
  const double stick = std::max(e.values[0] - e.values[1], 0.0);
  const double plate = std::max(e.values[1] - e.values[2], 0.0);
  const Vec3 v1 = e.vectors.col(0);
  const Vec3 v2 = e.vectors.col(1);
  const Mat3 v1v1 = v1 * v1.transpose();
  return stick * v1v1 + plate * (v1v1 + v2 * v2.transpose());
}

/// Saliencies [lambda2 - lambda3, lambda1 - lambda2, lambda3], clamped at 0.
inline Saliencies extract_saliencies(const Mat3& j2) {
  const SymEigen3 e = eigen_sym3(j2);
  return {std::max(e.values[1] - e.values[2], 0.0),
          std::max(e.values[0] - e.values[1], 0.0),
          std::max(e.values[2], 0.0)};
}

/**
 * Ellipsoid from a second-stage tensor: magnitudes invert the eigenvalues,
 * m_i = r / (lambda_i * sum_j lambda_j^-1), so they sum to the search radius.
 *
 * Eigenvalues are floored at 1e-8 * lambda1 before inversion; a perfectly
 * planar neighborhood (lambda2 = lambda3 = 0) then yields a disc rather than
 * no ellipsoid. Returns nullopt only when the tensor itself is vanishing,
 * which callers record as "no associated ellipsoid".
 */
inline std::optional<Ellipsoid> extract_ellipsoid(const Mat3& j2, double radius) {
  const SymEigen3 e = eigen_sym3(j2);
  if (!(e.values[0] > 1e-12)) return std::nullopt;
  const double floor = 1e-8 * e.values[0];
  std::array<double, 3> lam{};
  double inv_sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    lam[k] = std::max(e.values[k], floor);
    inv_sum += 1.0 / lam[k];
  }
  Ellipsoid out;
  for (int k = 0; k < 3; ++k) {
    out.axes[k] = e.vectors.col(k);
    out.magnitudes[k] = radius / (lam[k] * inv_sum);
  }
  out.saliencies = {std::max(e.values[1] - e.values[2], 0.0),
                    std::max(e.values[0] - e.values[1], 0.0),
                    std::max(e.values[2], 0.0)};
  return out;
}

}  // namespace elio
