#pragma once

#include "gaussocc/camera.hpp"
#include "gaussocc/config.hpp"
#include "gaussocc/geometry.hpp"
#include "gaussocc/grid.hpp"
#include "gaussocc/params.hpp"
#include "gaussocc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace testing {

using namespace gaussocc;

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline Quaternion random_quaternion(Rng& rng) {
  const double w = rng.normal(), x = rng.normal(), y = rng.normal(), z = rng.normal();
  return Quaternion(w, x, y, z);
}

inline GaussianPrimitive random_gaussian(Rng& rng, const Vec3& lo, const Vec3& hi, std::size_t classes) {
  GaussianPrimitive g;
  for (int a = 0; a < 3; ++a) g.mean[a] = rng.uniform(lo[a], hi[a]);
  for (int a = 0; a < 3; ++a) g.scale[a] = rng.uniform(0.2, 1.5);
  g.rotation = random_quaternion(rng);
  g.opacity = rng.uniform(0.05, 1.0);
  g.logits = Vector(static_cast<Eigen::Index>(classes));
  for (Eigen::Index c = 0; c < g.logits.size(); ++c) g.logits[c] = rng.uniform(-1.0, 1.0);
  return g;
}

inline GaussianSet random_set(Rng& rng, const GridSpec& grid, std::size_t count, std::size_t classes) {
  GaussianSet out;
  for (std::size_t n = 0; n < count; ++n) {
    out.push_back(random_gaussian(rng, grid.origin, grid.origin + grid.extent(), classes));
  }
  return out;
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double a = 1.0) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-a, a);
  return m;
}

inline SpatialParams random_spatial(Rng& rng, std::size_t d, std::size_t m, std::size_t cams, std::size_t levels) {
  SpatialParams s;
  s.offset = nn::LinearLayer(d, 3 * m);
  s.gate_gga = nn::LinearLayer(3, kGateLatent);
  s.gate_vga = nn::LinearLayer(3, kGateLatent);
  s.gate_ctx = nn::LinearLayer(3, kGateLatent);
  s.gate_out = nn::LinearLayer(3 * kGateLatent, 1);
  s.attn_weights = nn::LinearLayer(d, cams * levels * m);
  s.attn_output = nn::LinearLayer(d, d);
  for (auto* l : {&s.offset, &s.gate_gga, &s.gate_vga, &s.gate_ctx, &s.gate_out, &s.attn_weights, &s.attn_output}) {
    l->init_uniform(rng);
  }
  s.scale_gga = rng.uniform(0.5, 2.0);
  s.scale_vga = rng.uniform(0.5, 2.0);
  return s;
}

inline TemporalParams random_temporal(Rng& rng, std::size_t d, std::size_t tau) {
  TemporalParams t;
  t.gate = nn::Mlp({tau * d, d, d});
  t.gate.init_uniform(rng);
  t.refine = nn::Mlp({d, d, d});
  t.refine.init_uniform(rng);
  t.ln_gamma = Vector(static_cast<Eigen::Index>(d));
  t.ln_beta = Vector(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < t.ln_gamma.size(); ++i) {
    t.ln_gamma[i] = rng.uniform(0.5, 1.5);
    t.ln_beta[i] = rng.uniform(-0.5, 0.5);
  }
  return t;
}

inline RigidTransform random_pose(Rng& rng, double translation = 5.0) {
  return {random_quaternion(rng),
          Vec3(rng.uniform(-translation, translation), rng.uniform(-translation, translation),
               rng.uniform(-translation, translation))};
}

/// Small surround rig whose cameras carry D-channel feature pyramids.
inline CameraRig feature_rig(Rng& rng, std::size_t cams, std::size_t levels, std::size_t d, std::size_t w = 48,
                             std::size_t h = 32) {
  CameraRig rig = make_surround_rig(cams, w, h, 1.4, 0.0);
  const auto ratios = default_ratios(levels);
  for (auto& cam : rig) cam.pyramid = make_feature_pyramid(w, h, ratios, d, rng.next_u64());
  return rig;
}

inline SceneConfig tiny_config() {
  SceneConfig cfg;
  cfg.range_min = Vec3(-4.0, -4.0, -1.0);
  cfg.range_max = Vec3(4.0, 4.0, 1.0);
  cfg.dims = {16, 16, 4};
  cfg.voxel_size = 0.5;
  cfg.gaussians = 24;
  cfg.embed_dim = 8;
  cfg.blocks = 2;
  cfg.samples = 8;
  cfg.classes = 4;
  cfg.frames = 2;
  cfg.cameras = 3;
  cfg.levels = 2;
  cfg.image_width = 32;
  cfg.image_height = 24;
  return cfg;
}

inline LabelGrid random_labels(Rng& rng, const GridSpec& spec, std::size_t classes, double empty_fraction = 0.3) {
  LabelGrid g(spec, classes);
  for (auto& l : g.labels) {
    l = rng.uniform() < empty_fraction ? kEmptyLabel : static_cast<std::uint8_t>(rng.below(classes));
  }
  return g;
}

}  // namespace testing
