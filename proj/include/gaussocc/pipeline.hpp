#pragma once

#include "gaussocc/camera.hpp"
#include "gaussocc/config.hpp"
#include "gaussocc/grid.hpp"
#include "gaussocc/params.hpp"
#include "gaussocc/splat.hpp"

#include <optional>
#include <vector>

namespace gaussocc {

struct Frame {
  RigidTransform pose;  ///< perception -> world
  CameraRig rig;        ///< cameras with their feature pyramids
  std::optional<LabelGrid> ground_truth;
};

/// tau consecutive frames, oldest first; the last frame is the keyframe.
struct FrameSequence {
  std::vector<Frame> frames;
};

struct PipelineResult {
  GaussianSet gaussians;
  SplatOutput occupancy;
  Matrix keyframe_embedding;
  /// Per decoding step (each block, plus the post-block fusion when it
  /// runs): cross entropy + Lovasz-Softmax against the keyframe ground
  /// truth. Empty without ground truth.
  std::vector<double> block_losses;
  double total_loss = 0.0;
};

/// Class scores for the losses: the |C| splatted logits plus an empty-class
/// score ln(threshold / density) per voxel.
Matrix occupancy_scores(const SplatOutput& splat, double occupancy_threshold);

/// Cross entropy + Lovasz-Softmax of one splatted prediction.
double occupancy_loss(const SplatOutput& splat, const LabelGrid& ground_truth, double occupancy_threshold);

/// For every block: reference points from the keyframe, aligned into each
/// historical frame, deformable attention per frame, gated temporal fusion
/// inside the block (tight, coupled), refinement head on the keyframe.
/// Loose and coupled modes fuse once more after the last block. The final
/// Gaussians are splatted with the bounded kernel. Throws ShapeError when
/// the sequence length differs from cfg.frames.
PipelineResult run_pipeline(const FrameSequence& seq, const SceneConfig& cfg, const ParamStore& params);

}  // namespace gaussocc
