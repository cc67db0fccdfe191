#include "gaussocc/grid.hpp"

#include "gaussocc/error.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gaussocc {

void GridSpec::validate() const {
  if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0) throw ShapeError("grid dims must be positive");
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw ShapeError("voxel size must be positive and finite");
  }
  if (!origin.allFinite()) throw ShapeError("grid origin must be finite");
}

std::optional<VoxelIndex> GridSpec::locate(const Vec3& p) const {
  const Vec3 rel = (p - origin) / voxel_size;
  std::array<std::size_t, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor(rel[a]);
    if (!(f >= 0.0) || f >= static_cast<double>(dims[a])) return std::nullopt;
    idx[a] = static_cast<std::size_t>(f);
  }
  return VoxelIndex{idx[0], idx[1], idx[2]};
}

Vec3 voxel_center(const GridSpec& grid, const VoxelIndex& index) {
  if (!grid.contains(index)) {
    throw std::out_of_range("voxel index (" + std::to_string(index.i) + "," + std::to_string(index.j) +
                            "," + std::to_string(index.k) + ") outside grid");
  }
  return voxel_center_unchecked(grid, index.i, index.j, index.k);
}

LabelGrid::LabelGrid(const GridSpec& s, std::size_t classes, std::uint8_t fill)
    : spec(s), num_classes(classes), labels(s.voxel_count(), fill) {}

void LabelGrid::validate() const {
  spec.validate();
  if (num_classes == 0 || num_classes > kEmptyLabel) {
    throw std::invalid_argument("class count must be in [1, 255)");
  }
  if (labels.size() != spec.voxel_count()) throw ShapeError("label payload length != X*Y*Z");
  for (const auto l : labels) {
    if (l != kEmptyLabel && l >= num_classes) {
      throw std::invalid_argument("label " + std::to_string(l) + " outside class set");
    }
  }
}

}  // namespace gaussocc
