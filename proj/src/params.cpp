#include "gaussocc/params.hpp"

namespace gaussocc {

namespace {

TemporalParams make_temporal(const SceneConfig& cfg, Rng& rng) {
  const std::size_t d = cfg.embed_dim;
  TemporalParams t;
  t.gate = nn::Mlp({cfg.frames * d, d, d});
  t.gate.init_uniform(rng);
  t.refine = nn::Mlp({d, d, d});
  t.refine.init_uniform(rng);
  t.ln_gamma = Vector::Ones(static_cast<Eigen::Index>(d));
  t.ln_beta = Vector::Zero(static_cast<Eigen::Index>(d));
  return t;
}

HeadParams make_head(const SceneConfig& cfg, Rng& rng) {
  HeadParams h;
  h.mlp = nn::Mlp({cfg.embed_dim, cfg.embed_dim, 11 + cfg.classes});
  h.mlp.init_uniform(rng);
  return h;
}

void append(std::vector<double>& out, const nn::LinearLayer& l) {
  out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
  out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
}

void append(std::vector<double>& out, const nn::Mlp& m) {
  for (const auto& l : m.layers) append(out, l);
}

void append(std::vector<double>& out, const TemporalParams& t) {
  append(out, t.gate);
  append(out, t.refine);
  out.insert(out.end(), t.ln_gamma.data(), t.ln_gamma.data() + t.ln_gamma.size());
  out.insert(out.end(), t.ln_beta.data(), t.ln_beta.data() + t.ln_beta.size());
}

}  // namespace

ParamStore init_parameters(const SceneConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t d = cfg.embed_dim;
  const std::size_t m = cfg.samples;
  ParamStore store;
  store.blocks.resize(cfg.blocks);
  for (auto& b : store.blocks) {
    auto& s = b.spatial;
    s.offset = nn::LinearLayer(d, 3 * m);
    s.gate_gga = nn::LinearLayer(3, kGateLatent);
    s.gate_vga = nn::LinearLayer(3, kGateLatent);
    s.gate_ctx = nn::LinearLayer(3, kGateLatent);
    s.gate_out = nn::LinearLayer(3 * kGateLatent, 1);
    s.attn_weights = nn::LinearLayer(d, cfg.cameras * cfg.levels * m);
    s.attn_output = nn::LinearLayer(d, d);
    for (auto* l : {&s.offset, &s.gate_gga, &s.gate_vga, &s.gate_ctx, &s.gate_out, &s.attn_weights, &s.attn_output}) {
      l->init_uniform(rng);
    }
    b.temporal = make_temporal(cfg, rng);
    b.head = make_head(cfg, rng);
  }
  store.final_temporal = make_temporal(cfg, rng);
  store.final_head = make_head(cfg, rng);

  const Vec3 lo = cfg.range_min, hi = cfg.range_max;
  store.initial_gaussians.resize(cfg.gaussians);
  for (auto& g : store.initial_gaussians) {
    for (int a = 0; a < 3; ++a) g.mean[a] = rng.uniform(lo[a], hi[a]);
    for (int a = 0; a < 3; ++a) g.scale[a] = rng.uniform(1.0, 3.0) * cfg.voxel_size;
    const double qw = rng.normal(), qx = rng.normal(), qy = rng.normal(), qz = rng.normal();
    g.rotation = Quaternion(qw, qx, qy, qz);
    g.opacity = 0.5;
    g.logits = Vector(static_cast<Eigen::Index>(cfg.classes));
    for (Eigen::Index c = 0; c < g.logits.size(); ++c) g.logits[c] = rng.uniform(-0.1, 0.1);
  }
  store.initial_embedding = Matrix(static_cast<Eigen::Index>(cfg.gaussians), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < store.initial_embedding.size(); ++i) {
    store.initial_embedding.data()[i] = rng.uniform(-1.0, 1.0);
  }
  return store;
}

std::vector<double> flatten_parameters(const ParamStore& p) {
  std::vector<double> out;
  for (const auto& b : p.blocks) {
    const auto& s = b.spatial;
    append(out, s.offset);
    out.push_back(s.scale_gga);
    out.push_back(s.scale_vga);
    for (const auto* l : {&s.gate_gga, &s.gate_vga, &s.gate_ctx, &s.gate_out, &s.attn_weights, &s.attn_output}) {
      append(out, *l);
    }
    append(out, b.temporal);
    append(out, b.head.mlp);
  }
  append(out, p.final_temporal);
  append(out, p.final_head.mlp);
  for (const auto& g : p.initial_gaussians) {
    out.insert(out.end(), g.mean.data(), g.mean.data() + 3);
    out.insert(out.end(), g.scale.data(), g.scale.data() + 3);
    out.insert(out.end(), {g.rotation.w(), g.rotation.x(), g.rotation.y(), g.rotation.z(), g.opacity});
    out.insert(out.end(), g.logits.data(), g.logits.data() + g.logits.size());
  }
  out.insert(out.end(), p.initial_embedding.data(), p.initial_embedding.data() + p.initial_embedding.size());
  return out;
}

}  // namespace gaussocc
