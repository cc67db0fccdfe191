#include "gaussocc/pipeline.hpp"

#include "gaussocc/error.hpp"
#include "gaussocc/losses.hpp"
#include "gaussocc/spatial.hpp"
#include "gaussocc/temporal.hpp"

#include <cmath>
#include <string>

namespace gaussocc {

Matrix occupancy_scores(const SplatOutput& splat, double occupancy_threshold) {
  const std::size_t c = splat.logits.num_classes;
  const std::size_t n = splat.logits.spec.voxel_count();
  Matrix scores(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c + 1));
  const double floor = 1e-12;
  for (std::size_t v = 0; v < n; ++v) {
    const auto row = splat.logits.voxel(v);
    for (std::size_t k = 0; k < c; ++k) scores(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(k)) = row[k];
    scores(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(c)) =
        std::log(std::max(occupancy_threshold, floor) / std::max(splat.density.values[v], floor));
  }
  return scores;
}

double occupancy_loss(const SplatOutput& splat, const LabelGrid& ground_truth, double occupancy_threshold) {
  if (!(ground_truth.spec == splat.logits.spec) || ground_truth.num_classes != splat.logits.num_classes) {
    throw ShapeError("ground truth grid does not match the prediction grid");
  }
  const Matrix scores = occupancy_scores(splat, occupancy_threshold);
  const auto targets = nn::grid_targets(ground_truth);
  const double ce = nn::cross_entropy_loss(scores, targets).value;
  const double lovasz = nn::lovasz_softmax_loss(nn::softmax_rows(scores), targets).value;
  return ce + lovasz;
}

PipelineResult run_pipeline(const FrameSequence& seq, const SceneConfig& cfg, const ParamStore& params) {
  cfg.validate();
  const std::size_t tau = seq.frames.size();
  if (tau != cfg.frames) {
    throw ShapeError("sequence has " + std::to_string(tau) + " frames, config expects " + std::to_string(cfg.frames));
  }
  if (params.blocks.size() != cfg.blocks) throw ShapeError("parameter store block count does not match config");
  if (params.initial_gaussians.size() != cfg.gaussians) throw ShapeError("parameter store K does not match config");

  const GridSpec grid = cfg.grid();
  const Frame& key = seq.frames.back();
  PipelineResult result;
  GaussianSet gaussians = params.initial_gaussians;
  std::vector<Matrix> stack(tau, params.initial_embedding);

  auto record_loss = [&](const GaussianSet& g) {
    if (!key.ground_truth) return;
    const SplatOutput s = splat_bounded(g, grid, cfg.classes, cfg.cutoff_sigma, cfg.occupancy_threshold);
    result.block_losses.push_back(occupancy_loss(s, *key.ground_truth, cfg.occupancy_threshold));
  };

  for (const BlockParams& block : params.blocks) {
    const ReferencePoints key_points = gisa_reference_points(stack.back(), gaussians, block.spatial);
    for (std::size_t t = 0; t < tau; ++t) {
      const Frame& frame = seq.frames[t];
      const ReferencePoints points = t + 1 == tau ? key_points : align_points(key_points, key.pose, frame.pose);
      std::vector<ProjectedPoints> projected;
      projected.reserve(frame.rig.size());
      for (const auto& cam : frame.rig) projected.push_back(warp(points, cam));
      stack[t] = deform_attn(stack[t], frame.rig, projected, block.spatial);
    }
    if (fuses_inside_blocks(cfg.fusion_mode)) stack.back() = gtff(stack, block.temporal);
    gaussians = apply_refinement_head(stack.back(), gaussians, block.head, cfg);
    record_loss(gaussians);
  }
  if (fuses_after_blocks(cfg.fusion_mode)) {
    stack.back() = gtff(stack, params.final_temporal);
    gaussians = apply_refinement_head(stack.back(), gaussians, params.final_head, cfg);
    record_loss(gaussians);
  }

  for (const double l : result.block_losses) result.total_loss += l;
  result.occupancy = splat_bounded(gaussians, grid, cfg.classes, cfg.cutoff_sigma, cfg.occupancy_threshold);
  result.gaussians = std::move(gaussians);
  result.keyframe_embedding = std::move(stack.back());
  return result;
}

}  // namespace gaussocc
