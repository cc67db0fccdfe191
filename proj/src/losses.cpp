#include "gaussocc/losses.hpp"

#include "gaussocc/error.hpp"
#include "gaussocc/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gaussocc::nn {

namespace {

void check_labels(const Matrix& m, std::span<const int> labels) {
  if (static_cast<std::size_t>(m.rows()) != labels.size()) {
    throw ShapeError("loss input has " + std::to_string(m.rows()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  for (const int l : labels) {
    if (l < 0 || l >= m.cols()) throw std::out_of_range("label " + std::to_string(l) + " outside class range");
  }
}

}  // namespace

Matrix softmax_rows(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    out.row(r) = softmax(scores.row(r).transpose()).transpose();
  }
  return out;
}

LossResult cross_entropy_loss(const Matrix& scores, std::span<const int> labels,
                              std::span<const double> class_weights) {
  check_labels(scores, labels);
  if (!class_weights.empty() && class_weights.size() != static_cast<std::size_t>(scores.cols())) {
    throw ShapeError("class weight count must equal class count");
  }
  LossResult result;
  result.gradient = Matrix::Zero(scores.rows(), scores.cols());
  if (scores.rows() == 0) return result;

  double total_weight = 0.0;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const int y = labels[static_cast<std::size_t>(r)];
    const double w = class_weights.empty() ? 1.0 : class_weights[static_cast<std::size_t>(y)];
    const Vector row = scores.row(r).transpose();
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    result.value += w * (lse - row[y]);
    Vector p = (row.array() - lse).exp();
    p[y] -= 1.0;
    result.gradient.row(r) = w * p.transpose();
    total_weight += w;
  }
  result.value /= total_weight;
  result.gradient /= total_weight;
  return result;
}

std::vector<double> lovasz_grad(std::span<const double> fg) {
  const std::size_t n = fg.size();
  std::vector<double> jaccard(n);
  const double gts = std::accumulate(fg.begin(), fg.end(), 0.0);
  double cum_fg = 0.0, cum_bg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cum_fg += fg[i];
    cum_bg += 1.0 - fg[i];
    const double intersection = gts - cum_fg;
    const double uni = gts + cum_bg;
    jaccard[i] = 1.0 - intersection / uni;
  }
  for (std::size_t i = n; i-- > 1;) jaccard[i] -= jaccard[i - 1];
  return jaccard;
}

LossResult lovasz_softmax_loss(const Matrix& probs, std::span<const int> labels) {
  check_labels(probs, labels);
  const std::size_t n = labels.size();
  LossResult result;
  result.gradient = Matrix::Zero(probs.rows(), probs.cols());

  std::vector<std::size_t> order(n);
  std::vector<double> errors(n), fg_sorted(n);
  std::size_t present = 0;
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    bool any = false;
    for (const int l : labels) any = any || l == c;
    if (!any) continue;
    ++present;

    for (std::size_t i = 0; i < n; ++i) {
      const double fg = labels[i] == c ? 1.0 : 0.0;
      errors[i] = std::abs(fg - probs(static_cast<Eigen::Index>(i), c));
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return errors[a] > errors[b]; });
    for (std::size_t r = 0; r < n; ++r) fg_sorted[r] = labels[order[r]] == c ? 1.0 : 0.0;
    const std::vector<double> g = lovasz_grad(fg_sorted);

    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t i = order[r];
      result.value += errors[i] * g[r];
      // d|fg - p|/dp is -1 on foreground (p <= 1), +1 elsewhere.
      const double sign = fg_sorted[r] > 0.5 ? -1.0 : 1.0;
      result.gradient(static_cast<Eigen::Index>(i), c) += sign * g[r];
    }
  }
  if (present > 0) {
    result.value /= static_cast<double>(present);
    result.gradient /= static_cast<double>(present);
  }
  return result;
}

std::vector<int> grid_targets(const LabelGrid& labels) {
  std::vector<int> out(labels.labels.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = labels.labels[i] == kEmptyLabel ? static_cast<int>(labels.num_classes) : labels.labels[i];
  }
  return out;
}

}  // namespace gaussocc::nn
