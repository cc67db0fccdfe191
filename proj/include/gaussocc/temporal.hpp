#pragma once

#include "gaussocc/config.hpp"
#include "gaussocc/geometry.hpp"
#include "gaussocc/params.hpp"
#include "gaussocc/spatial.hpp"

#include <optional>
#include <span>

namespace gaussocc {

/// Maps keyframe reference points into a historical frame:
/// T = invert(pose_history) o pose_key, poses being perception -> world.
ReferencePoints align_points(const ReferencePoints& points, const RigidTransform& pose_key,
                             const RigidTransform& pose_history);

/// lambda_T = sigmoid(MLP(concat_t Q^t)) per Gaussian, K x D. `stack` holds
/// tau K x D embeddings ordered oldest first, keyframe last. `forced_logit`
/// replaces every gate logit. Throws ShapeError on a tau or shape mismatch.
Matrix temporal_gate(std::span<const Matrix> stack, const TemporalParams& params,
                     std::optional<double> forced_logit = std::nullopt);

/// Q~ = Q^ + lambda (.) Q^, row by row.
Matrix temporal_modulate(const Matrix& key, const Matrix& gate);

/// Q~ = Q^ + lambda_T (.) Q^ on the keyframe, then LN(Q^ + MLP(Q~)).
Matrix gtff(std::span<const Matrix> stack, const TemporalParams& params,
            std::optional<double> forced_logit = std::nullopt);

inline constexpr double kMinScale = 0.01;

/// Applies the decoded deltas of each embedding row to its Gaussian: mean
/// shifted then clamped to the perception range, scale through softplus
/// with a kMinScale floor, rotation composed with a normalized delta
/// quaternion, opacity through a sigmoid, logits added.
GaussianSet apply_refinement_head(const Matrix& embedding, const GaussianSet& gaussians, const HeadParams& head,
                                  const SceneConfig& cfg);

/// Scale floor, opacity range, in-range mean, unit quaternion, finite logits.
bool satisfies_invariants(const GaussianPrimitive& g, const SceneConfig& cfg, std::string* why = nullptr);

}  // namespace gaussocc
