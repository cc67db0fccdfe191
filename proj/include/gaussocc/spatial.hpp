#pragma once

#include "gaussocc/camera.hpp"
#include "gaussocc/geometry.hpp"
#include "gaussocc/params.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gaussocc {

/// K x M 3-vectors, row (Gaussian) major. Used for offsets and for
/// reference points alike.
struct PointSet {
  std::size_t gaussians = 0, samples = 0;
  std::vector<Vec3> points;

  PointSet() = default;
  PointSet(std::size_t k, std::size_t m) : gaussians(k), samples(m), points(k * m, Vec3::Zero()) {}

  Vec3& at(std::size_t i, std::size_t m) { return points[i * samples + m]; }
  const Vec3& at(std::size_t i, std::size_t m) const { return points[i * samples + m]; }
  std::span<const Vec3> row(std::size_t i) const { return {points.data() + i * samples, samples}; }
};

using OffsetSet = PointSet;
using ReferencePoints = PointSet;

/// Per-camera pixel coordinates of every reference point plus visibility.
struct ProjectedPoints {
  std::size_t gaussians = 0, samples = 0;
  std::vector<Eigen::Vector2d> pixels;
  std::vector<std::uint8_t> visible;
};

inline constexpr double kNearPlane = 0.1;

/// Fixed 3D lattice in the Gaussian frame: first M points (x fastest) of an
/// n^3 lattice spanning [-0.5, 0.5], n = ceil(cbrt(M)). M = 8 gives the
/// corners {-0.5, 0.5}^3.
std::vector<Vec3> gga_proposal_grid(std::size_t samples);

/// Unit-spaced grid on the local y-z plane (x = 0), centered, first M cells
/// row-major with y fastest; ceil(sqrt(M)) columns.
std::vector<Vec3> vga_proposal_grid(std::size_t samples);

/// Shared offset predictor applied per Gaussian: K x D -> K x M x 3.
OffsetSet context_offset(const Matrix& embedding, const SpatialParams& params);

/// R diag(s) (s^G P^{G_L} + ctx) for each sample point.
std::vector<Vec3> gga_offsets(const GaussianPrimitive& g, std::span<const Vec3> context, double scale_factor,
                              std::span<const Vec3> proposal);
std::vector<Vec3> gga_offsets(const GaussianPrimitive& g, const Vector& embedding_row, const SpatialParams& params);

/// Rotation about z by the azimuth atan2(m_y, m_x); identity at m_x = m_y = 0.
Mat3 azimuth_rotation(const Vec3& mean);

/// R^V(theta) (s^V P^{V_L} + ctx) for each sample point.
std::vector<Vec3> vga_offsets(const GaussianPrimitive& g, std::span<const Vec3> context, double scale_factor,
                              std::span<const Vec3> proposal);
std::vector<Vec3> vga_offsets(const GaussianPrimitive& g, const Vector& embedding_row, const SpatialParams& params);

/// Per-sample gate logit from the projected offset embeddings.
double gate_logit(const Vec3& gga, const Vec3& vga, const Vec3& ctx, const SpatialParams& params);

/// lambda * gga + (1 - lambda) * vga with lambda = sigmoid(gate logit).
/// `forced_logit` replaces every gate logit (use +-infinity for the
/// endpoints). When `gate` is non-null it receives lambda as a K x M matrix.
OffsetSet gsfa_fuse(const OffsetSet& gga, const OffsetSet& vga, const OffsetSet& ctx, const SpatialParams& params,
                    std::optional<double> forced_logit = std::nullopt, Matrix* gate = nullptr);

/// means[i] + offsets(i, m). Throws ShapeError on a size mismatch.
ReferencePoints reference_points(std::span<const Vec3> means, const OffsetSet& offsets);

/// Pinhole projection; visible iff z_cam > kNearPlane and the pixel lies in
/// [0, W) x [0, H).
ProjectedPoints warp(const ReferencePoints& points, const Camera& camera);

/// Bilinear interpolation at texel coordinates (u, v) with zero padding.
Vector bilinear_sample(const FeaturePlane& plane, double u, double v);

/// Texel coordinates on `plane` of an image pixel (half-pixel aligned).
inline Eigen::Vector2d pixel_to_level(const FeaturePlane& plane, const Eigen::Vector2d& px) {
  const double r = static_cast<double>(plane.ratio);
  return {(px.x() + 0.5) / r - 0.5, (px.y() + 0.5) / r - 0.5};
}

/// Attention weights over (camera, level, sample) slots, for inspection.
struct AttentionTrace {
  std::vector<std::vector<double>> weights;  ///< per Gaussian, masked slots are 0
};

/// Single-head deformable cross-attention: slot logits from the query,
/// softmax over visible slots, weighted bilinear samples, output projection,
/// residual add. A Gaussian with no visible slot keeps its query unchanged.
Matrix deform_attn(const Matrix& embedding, std::span<const Camera> cameras,
                   std::span<const ProjectedPoints> projected, const SpatialParams& params,
                   AttentionTrace* trace = nullptr);

/// Offsets, gate and reference points of one block without the attention.
ReferencePoints gisa_reference_points(const Matrix& embedding, const GaussianSet& gaussians,
                                      const SpatialParams& params);

struct GisaResult {
  Matrix embedding;
  ReferencePoints points;
};

/// One guidance-informed spatial aggregation step for a single frame.
GisaResult gisa_block(const Matrix& embedding, const GaussianSet& gaussians, std::span<const Camera> rig,
                      const SpatialParams& params);

}  // namespace gaussocc
