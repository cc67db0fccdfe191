#include "gaussocc/metrics.hpp"

#include "gaussocc/error.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gaussocc {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& rhs) {
  if (classes.size() < rhs.classes.size()) classes.resize(rhs.classes.size());
  for (std::size_t c = 0; c < rhs.classes.size(); ++c) {
    classes[c].tp += rhs.classes[c].tp;
    classes[c].fp += rhs.classes[c].fp;
    classes[c].fn += rhs.classes[c].fn;
  }
  occupied.tp += rhs.occupied.tp;
  occupied.fp += rhs.occupied.fp;
  occupied.fn += rhs.occupied.fn;
  return *this;
}

ConfusionCounts confusion(const LabelGrid& pred, const LabelGrid& gt) {
  if (pred.spec.dims != gt.spec.dims || pred.labels.size() != gt.labels.size()) {
    throw ShapeError("prediction and ground truth grids differ in dims");
  }
  if (pred.num_classes != gt.num_classes) throw ShapeError("prediction and ground truth differ in class count");
  ConfusionCounts out;
  out.classes.resize(gt.num_classes);
  for (std::size_t v = 0; v < gt.labels.size(); ++v) {
    const std::uint8_t p = pred.labels[v], g = gt.labels[v];
    if (p == g) {
      if (p != kEmptyLabel) ++out.classes[p].tp;
    } else {
      if (p != kEmptyLabel) ++out.classes[p].fp;
      if (g != kEmptyLabel) ++out.classes[g].fn;
    }
    const bool po = p != kEmptyLabel, go = g != kEmptyLabel;
    if (po && go) ++out.occupied.tp;
    else if (po) ++out.occupied.fp;
    else if (go) ++out.occupied.fn;
  }
  return out;
}

std::optional<double> class_iou(const ClassCounts& c) {
  const std::uint64_t denom = c.tp + c.fp + c.fn;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(denom);
}

double sc_iou(const ConfusionCounts& counts) { return class_iou(counts.occupied).value_or(1.0); }

double mean_iou(const ConfusionCounts& counts) {
  double sum = 0.0;
  std::size_t present = 0;
  for (const auto& c : counts.classes) {
    if (const auto iou = class_iou(c)) {
      sum += *iou;
      ++present;
    }
  }
  if (present == 0) throw std::domain_error("mIoU undefined: no class present in prediction or ground truth");
  return sum / static_cast<double>(present);
}

LabelGrid resample_into(const LabelGrid& next, const RigidTransform& pose_current, const RigidTransform& pose_next) {
  const RigidTransform current_to_next = compose(invert(pose_next), pose_current);
  LabelGrid out(next.spec, next.num_classes);
  const GridSpec& g = next.spec;
  for (std::size_t v = 0; v < out.labels.size(); ++v) {
    const VoxelIndex idx = g.unravel(v);
    const Vec3 x = current_to_next.apply(voxel_center_unchecked(g, idx.i, idx.j, idx.k));
    if (const auto hit = g.locate(x)) out.labels[v] = next.at(*hit);
  }
  return out;
}

StcvResult stcv(std::span<const LabelGrid> frames, std::span<const RigidTransform> poses) {
  if (frames.size() < 2) throw std::invalid_argument("STCV needs at least two frames");
  for (const auto& f : frames) {
    if (f.spec.dims != frames.front().spec.dims || f.labels.size() != frames.front().labels.size()) {
      throw ShapeError("STCV frames differ in dims");
    }
  }
  if (!poses.empty() && poses.size() != frames.size()) throw ShapeError("STCV needs one pose per frame");

  StcvResult out;
  double sum = 0.0;
  for (std::size_t t = 0; t + 1 < frames.size(); ++t) {
    const LabelGrid& a = frames[t];
    const LabelGrid aligned = poses.empty() ? LabelGrid{} : resample_into(frames[t + 1], poses[t], poses[t + 1]);
    const LabelGrid& b = poses.empty() ? frames[t + 1] : aligned;
    std::uint64_t shared = 0, changed = 0;
    for (std::size_t v = 0; v < a.labels.size(); ++v) {
      if (a.labels[v] == kEmptyLabel || b.labels[v] == kEmptyLabel) continue;
      ++shared;
      if (a.labels[v] != b.labels[v]) ++changed;
    }
    if (shared == 0) {
      ++out.flagged_pairs;
      continue;
    }
    sum += static_cast<double>(changed) / static_cast<double>(shared);
  }
  out.value = sum / static_cast<double>(frames.size() - 1);
  return out;
}

StcvReport stcv_aggregate(std::span<const double> per_scene) {
  if (per_scene.empty()) throw std::invalid_argument("STCV aggregate needs at least one scene");
  StcvReport r;
  r.per_scene.assign(per_scene.begin(), per_scene.end());
  r.mean = std::accumulate(per_scene.begin(), per_scene.end(), 0.0) / static_cast<double>(per_scene.size());
  const auto [mn, mx] = std::minmax_element(per_scene.begin(), per_scene.end());
  r.min = *mn;
  r.max = *mx;
  // Rounding in the sum can push the mean of equal values past them.
  r.mean = std::clamp(r.mean, r.min, r.max);
  return r;
}

}  // namespace gaussocc
