#include "gaussocc/splat.hpp"

#include "gaussocc/parallel.hpp"
#include "splat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gaussocc {

namespace {

constexpr std::size_t kTile = 8;

using Range = std::array<std::size_t, 6>;  // lo_x, hi_x, lo_y, hi_y, lo_z, hi_z (inclusive)

/// Voxel index range whose centers lie within `half[a]` of `mean` on every
/// axis a. Returns false when the box misses the grid.
bool support_range(const Vec3& mean, const Vec3& half_extent, const GridSpec& grid, Range& out) {
  for (int a = 0; a < 3; ++a) {
    const double half = half_extent[a];
    const auto n = static_cast<std::ptrdiff_t>(grid.dims[a]);
    std::ptrdiff_t lo = 0, hi = n - 1;
    if (std::isfinite(half)) {
      // center_i = origin + (i + 0.5) * vs in [mean - half, mean + half]
      const double flo = std::ceil((mean[a] - half - grid.origin[a]) / grid.voxel_size - 0.5);
      const double fhi = std::floor((mean[a] + half - grid.origin[a]) / grid.voxel_size - 0.5);
      if (fhi < 0.0 || flo > static_cast<double>(n - 1) || flo > fhi) return false;
      lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(flo));
      hi = std::min<std::ptrdiff_t>(n - 1, static_cast<std::ptrdiff_t>(fhi));
    }
    out[2 * a] = static_cast<std::size_t>(lo);
    out[2 * a + 1] = static_cast<std::size_t>(hi);
  }
  return true;
}

SplatOutput make_output(const GridSpec& grid, std::size_t num_classes) {
  grid.validate();
  SplatOutput out;
  out.logits = LogitGrid(grid, num_classes);
  out.density = ScalarGrid(grid);
  return out;
}

}  // namespace

LabelGrid labels_from_logits(const LogitGrid& logits, const ScalarGrid& density, double occupancy_threshold) {
  if (!(logits.spec == density.spec) || density.values.size() != logits.spec.voxel_count()) {
    throw ShapeError("logit and density grids differ in shape");
  }
  LabelGrid labels(logits.spec, logits.num_classes);
  for (std::size_t v = 0; v < labels.labels.size(); ++v) {
    if (!(density.values[v] >= occupancy_threshold)) continue;
    const auto row = logits.voxel(v);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    labels.labels[v] = static_cast<std::uint8_t>(best);
  }
  return labels;
}

SplatOutput splat_dense(const GaussianSet& gaussians, const GridSpec& grid, std::size_t num_classes,
                        double occupancy_threshold) {
  SplatOutput out = make_output(grid, num_classes);
  const auto prepared = detail::prepare(gaussians, num_classes);
  const auto voxels = static_cast<std::ptrdiff_t>(grid.voxel_count());
  double* logits = out.logits.values.data();
  double* density = out.density.values.data();

#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t v = 0; v < voxels; ++v) {
    const VoxelIndex idx = grid.unravel(static_cast<std::size_t>(v));
    const Vec3 x = voxel_center_unchecked(grid, idx.i, idx.j, idx.k);
    double* row = logits + static_cast<std::size_t>(v) * num_classes;
    for (const auto& g : prepared) {
      detail::accumulate(g, detail::weight_at(g, x), row, density[v], num_classes);
    }
  }
  out.evaluations = grid.voxel_count() * prepared.size();
  out.labels = labels_from_logits(out.logits, out.density, occupancy_threshold);
  return out;
}

SplatOutput splat_bounded(const GaussianSet& gaussians, const GridSpec& grid, std::size_t num_classes,
                          double cutoff_sigma, double occupancy_threshold) {
  if (!(cutoff_sigma > 0.0)) throw std::invalid_argument("cutoff_sigma must be positive");
  SplatOutput out = make_output(grid, num_classes);
  const auto prepared = detail::prepare(gaussians, num_classes);

  const std::array<std::size_t, 3> tiles{(grid.dims[0] + kTile - 1) / kTile, (grid.dims[1] + kTile - 1) / kTile,
                                         (grid.dims[2] + kTile - 1) / kTile};
  const std::size_t tile_count = tiles[0] * tiles[1] * tiles[2];

  // Bin Gaussians into tiles in input order; serial so bins are deterministic.
  std::vector<Range> ranges(prepared.size());
  std::vector<std::vector<std::uint32_t>> bins(tile_count);
  for (std::size_t n = 0; n < prepared.size(); ++n) {
    Range& r = ranges[n];
    if (!support_range(prepared[n].mean, cutoff_sigma * prepared[n].half_extent, grid, r)) continue;
    for (std::size_t tz = r[4] / kTile; tz <= r[5] / kTile; ++tz) {
      for (std::size_t ty = r[2] / kTile; ty <= r[3] / kTile; ++ty) {
        for (std::size_t tx = r[0] / kTile; tx <= r[1] / kTile; ++tx) {
          bins[tx + tiles[0] * (ty + tiles[1] * tz)].push_back(static_cast<std::uint32_t>(n));
        }
      }
    }
  }

  double* logits = out.logits.values.data();
  double* density = out.density.values.data();
  std::size_t evaluations = 0;

#pragma omp parallel for schedule(dynamic, 1) reduction(+ : evaluations) num_threads(thread_count())
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tile_count); ++t) {
    const auto& bin = bins[static_cast<std::size_t>(t)];
    if (bin.empty()) continue;
    const std::size_t tx = static_cast<std::size_t>(t) % tiles[0];
    const std::size_t ty = (static_cast<std::size_t>(t) / tiles[0]) % tiles[1];
    const std::size_t tz = static_cast<std::size_t>(t) / (tiles[0] * tiles[1]);
    const std::size_t k_end = std::min(grid.dims[2], (tz + 1) * kTile);
    const std::size_t j_end = std::min(grid.dims[1], (ty + 1) * kTile);
    const std::size_t i_end = std::min(grid.dims[0], (tx + 1) * kTile);
    for (std::size_t k = tz * kTile; k < k_end; ++k) {
      for (std::size_t j = ty * kTile; j < j_end; ++j) {
        for (std::size_t i = tx * kTile; i < i_end; ++i) {
          const std::size_t v = grid.linear({i, j, k});
          const Vec3 x = voxel_center_unchecked(grid, i, j, k);
          double* row = logits + v * num_classes;
          for (const std::uint32_t n : bin) {
            const Range& r = ranges[n];
            if (i < r[0] || i > r[1] || j < r[2] || j > r[3] || k < r[4] || k > r[5]) continue;
            const auto& g = prepared[n];
            detail::accumulate(g, detail::weight_at(g, x), row, density[v], num_classes);
            ++evaluations;
          }
        }
      }
    }
  }
  out.evaluations = evaluations;
  out.labels = labels_from_logits(out.logits, out.density, occupancy_threshold);
  return out;
}

std::size_t support_voxel_count(const GaussianPrimitive& g, const GridSpec& grid, double cutoff_sigma) {
  Range r{};
  const Vec3 half = detail::support_half_extent(quat_to_rotation(g.rotation), g.scale.maxCoeff());
  if (!support_range(g.mean, cutoff_sigma * half, grid, r)) return 0;
  return (r[1] - r[0] + 1) * (r[3] - r[2] + 1) * (r[5] - r[4] + 1);
}

}  // namespace gaussocc
