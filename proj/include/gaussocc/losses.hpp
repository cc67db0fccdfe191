#pragma once

#include "gaussocc/geometry.hpp"
#include "gaussocc/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace gaussocc::nn {

/// Scalar loss and its gradient with respect to the N x C input.
struct LossResult {
  double value = 0.0;
  Matrix gradient;
};

/// Mean over rows of -log softmax(scores)[label]. With class weights the
/// mean is weighted: sum w_y l / sum w_y. Throws ShapeError on size
/// mismatch, std::out_of_range on a label outside [0, C).
LossResult cross_entropy_loss(const Matrix& scores, std::span<const int> labels,
                              std::span<const double> class_weights = {});

/// Lovasz extension gradient of the Jaccard loss for a foreground indicator
/// sorted by decreasing error.
std::vector<double> lovasz_grad(std::span<const double> sorted_foreground);

/// Lovasz-Softmax over classes present in `labels`; `probs` rows lie on the
/// simplex. Zero when no class is present.
LossResult lovasz_softmax_loss(const Matrix& probs, std::span<const int> labels);

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& scores);

/// Voxel targets for a label grid: class ids, with kEmptyLabel mapped to
/// `num_classes` (the empty class is the last column of the scores).
std::vector<int> grid_targets(const LabelGrid& labels);

}  // namespace gaussocc::nn
