#pragma once

#include "gaussocc/config.hpp"
#include "gaussocc/geometry.hpp"
#include "gaussocc/nn.hpp"
#include "gaussocc/rng.hpp"

#include <cstddef>
#include <vector>

namespace gaussocc {

inline constexpr std::size_t kGateLatent = 16;

/// Learnable tensors of one spatial aggregation step.
struct SpatialParams {
  nn::LinearLayer offset;  ///< shared offset predictor, D -> 3M
  double scale_gga = 1.0;  ///< sampling radius in the Gaussian frame
  double scale_vga = 1.0;  ///< sampling radius in the view frame
  nn::LinearLayer gate_gga, gate_vga, gate_ctx;  ///< 3 -> kGateLatent each
  nn::LinearLayer gate_out;                       ///< 3 * kGateLatent -> 1
  nn::LinearLayer attn_weights;  ///< D -> cameras * levels * M
  nn::LinearLayer attn_output;   ///< D -> D

  std::size_t samples() const { return offset.out() / 3; }
};

/// Gated temporal fusion: weight generator over the concatenated frame
/// stack, residual refinement, layer-norm affine.
struct TemporalParams {
  nn::Mlp gate;    ///< tau * D -> D -> D
  nn::Mlp refine;  ///< D -> D -> D
  Vector ln_gamma, ln_beta;

  std::size_t frames() const { return gate.in() / refine.in(); }
};

/// Decodes an embedding into deltas: mean(3), scale(3), rotation(4),
/// opacity(1), logits(|C|).
struct HeadParams {
  nn::Mlp mlp;  ///< D -> D -> 11 + |C|
};

struct BlockParams {
  SpatialParams spatial;
  TemporalParams temporal;
  HeadParams head;
};

struct ParamStore {
  std::vector<BlockParams> blocks;
  TemporalParams final_temporal;
  HeadParams final_head;
  GaussianSet initial_gaussians;
  Matrix initial_embedding;  ///< K x D queries
};

/// Deterministic initialization from `rng`: uniform(-a, a), a = 1/sqrt(fan_in)
/// for every affine layer; layer-norm gamma = 1, beta = 0; s^G = s^V = 1.
/// Initial Gaussians are spread uniformly over the perception range.
ParamStore init_parameters(const SceneConfig& cfg, Rng& rng);

/// Every learnable scalar in a fixed order, for comparisons.
std::vector<double> flatten_parameters(const ParamStore& params);

}  // namespace gaussocc
