#pragma once

#include "gaussocc/error.hpp"
#include "gaussocc/geometry.hpp"
#include "gaussocc/grid.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace gaussocc::detail {

/// Gaussian with its precision matrix in packed symmetric form.
struct PreparedGaussian {
  Vec3 mean;
  double a00, a01, a02, a11, a12, a22;
  double opacity;
  const double* logits;
  /// Axis-aligned half extent per unit cutoff: the bounding box of the cube
  /// of half size max(s) along the Gaussian's own axes.
  Vec3 half_extent;
};

inline Vec3 support_half_extent(const Mat3& r, double max_scale) {
  return r.cwiseAbs().rowwise().sum() * max_scale;
}

inline std::vector<PreparedGaussian> prepare(const GaussianSet& gaussians, std::size_t num_classes) {
  std::vector<PreparedGaussian> out;
  out.reserve(gaussians.size());
  for (std::size_t n = 0; n < gaussians.size(); ++n) {
    const auto& g = gaussians[n];
    if (!(g.scale.array() > 0.0).all()) {
      throw DegenerateInput("Gaussian " + std::to_string(n) + " has a non-positive scale");
    }
    if (static_cast<std::size_t>(g.logits.size()) != num_classes) {
      throw ShapeError("Gaussian " + std::to_string(n) + " has " + std::to_string(g.logits.size()) +
                       " logits, expected " + std::to_string(num_classes));
    }
    // Sigma^-1 = R diag(1/s^2) R^T.
    const Mat3 r = quat_to_rotation(g.rotation);
    const Vec3 inv2 = g.scale.array().square().inverse();
    const Mat3 a = r * inv2.asDiagonal() * r.transpose();
    out.push_back({g.mean, a(0, 0), 0.5 * (a(0, 1) + a(1, 0)), 0.5 * (a(0, 2) + a(2, 0)), a(1, 1),
                   0.5 * (a(1, 2) + a(2, 1)), a(2, 2), g.opacity, g.logits.data(),
                   support_half_extent(r, g.scale.maxCoeff())});
  }
  return out;
}

/// exp(-e) is a denormal or zero beyond this.
inline constexpr double kMaxExponent = 746.0;

/// alpha * exp(-q/2). Returns exactly 0 once exp underflows.
inline double weight_at(const PreparedGaussian& g, const Vec3& x) {
  const double dx = x.x() - g.mean.x();
  const double dy = x.y() - g.mean.y();
  const double dz = x.z() - g.mean.z();
  const double q = g.a00 * dx * dx + g.a11 * dy * dy + g.a22 * dz * dz +
                   2.0 * (g.a01 * dx * dy + g.a02 * dx * dz + g.a12 * dy * dz);
  const double e = 0.5 * q;
  if (e > kMaxExponent) return 0.0;
  return g.opacity * std::exp(-e);
}

inline void accumulate(const PreparedGaussian& g, double w, double* logits, double& density,
                       std::size_t num_classes) {
  if (w == 0.0) return;
  density += w;
  for (std::size_t c = 0; c < num_classes; ++c) logits[c] += w * g.logits[c];
}

}  // namespace gaussocc::detail
