#pragma once

#include "gaussocc/geometry.hpp"
#include "gaussocc/grid.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gaussocc {

struct ClassCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0;
  bool operator==(const ClassCounts&) const = default;
};

/// Per non-empty class counts plus the class-agnostic occupied-vs-empty
/// counts. Additive across disjoint voxel sets and across frames.
struct ConfusionCounts {
  std::vector<ClassCounts> classes;
  ClassCounts occupied;

  ConfusionCounts& operator+=(const ConfusionCounts& rhs);
  bool operator==(const ConfusionCounts&) const = default;
};

/// Throws ShapeError when the grids differ in dims or class count.
ConfusionCounts confusion(const LabelGrid& pred, const LabelGrid& gt);

/// Class-agnostic IoU; 1.0 when both grids are entirely empty.
double sc_iou(const ConfusionCounts& counts);

/// TP / (TP + FP + FN), or nullopt for a class absent from both grids.
std::optional<double> class_iou(const ClassCounts& c);

/// Mean IoU over classes present in either grid. Throws std::domain_error
/// when no class is present.
double mean_iou(const ConfusionCounts& counts);

struct StcvResult {
  double value = 0.0;
  /// Adjacent pairs without shared non-empty voxels; they contribute 0.
  std::size_t flagged_pairs = 0;
};

/// Fraction of voxels non-empty in two consecutive frames whose labels
/// differ, averaged over the L - 1 pairs. With `poses` (perception -> world,
/// one per frame), frame t+1 is resampled into frame t's lattice by
/// nearest-voxel lookup before comparing. Throws std::invalid_argument for
/// L < 2 and ShapeError for mismatched dims or pose count.
StcvResult stcv(std::span<const LabelGrid> frames, std::span<const RigidTransform> poses = {});

/// Frame `next` expressed on `current`'s lattice: each voxel of `current`
/// takes the label of the voxel of `next` containing the aligned center,
/// empty when outside.
LabelGrid resample_into(const LabelGrid& next, const RigidTransform& pose_current, const RigidTransform& pose_next);

struct StcvReport {
  std::vector<double> per_scene;
  double mean = 0.0, min = 0.0, max = 0.0;
  std::size_t flagged_pairs = 0;
};

/// Throws std::invalid_argument on empty input.
StcvReport stcv_aggregate(std::span<const double> per_scene);

}  // namespace gaussocc
