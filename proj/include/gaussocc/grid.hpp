#pragma once

#include "gaussocc/geometry.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gaussocc {

inline constexpr std::uint8_t kEmptyLabel = 255;

struct VoxelIndex {
  std::size_t i = 0, j = 0, k = 0;
  bool operator==(const VoxelIndex&) const = default;
};

/// Regular lattice geometry. Linear order is x fastest, then y, then z.
struct GridSpec {
  std::array<std::size_t, 3> dims{1, 1, 1};
  Vec3 origin = Vec3::Zero();  ///< min corner, meters
  double voxel_size = 1.0;

  /// Throws ShapeError on zero dims or a non-positive voxel size.
  void validate() const;

  std::size_t voxel_count() const noexcept { return dims[0] * dims[1] * dims[2]; }
  std::size_t linear(const VoxelIndex& v) const noexcept {
    return v.i + dims[0] * (v.j + dims[1] * v.k);
  }
  VoxelIndex unravel(std::size_t idx) const noexcept {
    return {idx % dims[0], (idx / dims[0]) % dims[1], idx / (dims[0] * dims[1])};
  }
  bool contains(const VoxelIndex& v) const noexcept {
    return v.i < dims[0] && v.j < dims[1] && v.k < dims[2];
  }

  /// Voxel that owns point p (floor((p - origin) / voxel_size)), if inside.
  std::optional<VoxelIndex> locate(const Vec3& p) const;

  Vec3 extent() const {
    return Vec3(static_cast<double>(dims[0]), static_cast<double>(dims[1]),
                static_cast<double>(dims[2])) *
           voxel_size;
  }

  bool operator==(const GridSpec&) const = default;
};

/// origin + (index + 0.5) * voxel_size. Throws std::out_of_range outside dims.
Vec3 voxel_center(const GridSpec& grid, const VoxelIndex& index);

/// Unchecked variant for kernels that iterate known-valid indices.
inline Vec3 voxel_center_unchecked(const GridSpec& g, std::size_t i, std::size_t j, std::size_t k) {
  return {g.origin.x() + (static_cast<double>(i) + 0.5) * g.voxel_size,
          g.origin.y() + (static_cast<double>(j) + 0.5) * g.voxel_size,
          g.origin.z() + (static_cast<double>(k) + 0.5) * g.voxel_size};
}

/// Per-voxel class labels in [0, num_classes) or kEmptyLabel.
struct LabelGrid {
  GridSpec spec;
  std::size_t num_classes = 0;
  std::vector<std::uint8_t> labels;

  LabelGrid() = default;
  LabelGrid(const GridSpec& s, std::size_t classes, std::uint8_t fill = kEmptyLabel);

  /// Throws ShapeError / std::invalid_argument for bad payload length or labels.
  void validate() const;

  std::uint8_t& at(const VoxelIndex& v) { return labels[spec.linear(v)]; }
  std::uint8_t at(const VoxelIndex& v) const { return labels[spec.linear(v)]; }

  bool operator==(const LabelGrid&) const = default;
};

/// Per-voxel |C|-vector, voxel-major (all classes of voxel 0 first).
struct LogitGrid {
  GridSpec spec;
  std::size_t num_classes = 0;
  std::vector<double> values;

  LogitGrid() = default;
  LogitGrid(const GridSpec& s, std::size_t classes)
      : spec(s), num_classes(classes), values(s.voxel_count() * classes, 0.0) {}

  std::span<double> voxel(std::size_t idx) { return {values.data() + idx * num_classes, num_classes}; }
  std::span<const double> voxel(std::size_t idx) const {
    return {values.data() + idx * num_classes, num_classes};
  }
};

/// Per-voxel scalar.
struct ScalarGrid {
  GridSpec spec;
  std::vector<double> values;

  ScalarGrid() = default;
  explicit ScalarGrid(const GridSpec& s) : spec(s), values(s.voxel_count(), 0.0) {}
};

}  // namespace gaussocc
