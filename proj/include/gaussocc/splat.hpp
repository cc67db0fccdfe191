#pragma once

#include "gaussocc/geometry.hpp"
#include "gaussocc/grid.hpp"

#include <cstddef>
#include <limits>

namespace gaussocc {

inline constexpr double kDefaultOccupancyThreshold = 0.05;
/// Passing this as the cutoff makes every Gaussian touch every voxel.
inline constexpr double kUnboundedCutoff = std::numeric_limits<double>::infinity();

struct SplatOutput {
  LogitGrid logits;     ///< sum_i alpha_i g_i(x) c_i
  LabelGrid labels;     ///< argmax of logits where density >= threshold, else empty
  ScalarGrid density;   ///< sum_i alpha_i g_i(x)
  std::size_t evaluations = 0;  ///< (voxel, Gaussian) pairs evaluated
};

/// Exact evaluation of every Gaussian at every voxel center, parallel over
/// voxels. Per-voxel sums run over Gaussians in input order, so the result
/// does not depend on the thread count. Throws ShapeError when a Gaussian's
/// logit count differs from `num_classes`, DegenerateInput on a bad scale.
SplatOutput splat_dense(const GaussianSet& gaussians, const GridSpec& grid, std::size_t num_classes,
                        double occupancy_threshold = kDefaultOccupancyThreshold);

/// Bounded-support path: Gaussian i only contributes to voxels whose centers
/// lie in the axis-aligned bounding box of the cube of half size
/// cutoff_sigma * max(s_i) aligned with its own axes. Voxels are processed tile by tile in parallel; the summation
/// order per voxel matches splat_dense, so an infinite cutoff reproduces it
/// bit for bit. Throws std::invalid_argument when cutoff_sigma <= 0.
SplatOutput splat_bounded(const GaussianSet& gaussians, const GridSpec& grid, std::size_t num_classes,
                          double cutoff_sigma, double occupancy_threshold = kDefaultOccupancyThreshold);

/// argmax (lowest index on ties) where density >= threshold, empty otherwise.
LabelGrid labels_from_logits(const LogitGrid& logits, const ScalarGrid& density, double occupancy_threshold);

/// Number of voxels inside the bounded-support box of g.
std::size_t support_voxel_count(const GaussianPrimitive& g, const GridSpec& grid, double cutoff_sigma);

namespace reference {

/// Single-threaded triple loop over the lattice; the baseline the parallel
/// kernels are benchmarked and tested against.
SplatOutput splat_serial(const GaussianSet& gaussians, const GridSpec& grid, std::size_t num_classes,
                         double occupancy_threshold = kDefaultOccupancyThreshold);

}  // namespace reference

}  // namespace gaussocc
