#include "gaussocc/temporal.hpp"

#include "gaussocc/error.hpp"
#include "gaussocc/nn.hpp"
#include "gaussocc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gaussocc {

ReferencePoints align_points(const ReferencePoints& points, const RigidTransform& pose_key,
                             const RigidTransform& pose_history) {
  const RigidTransform key_to_history = compose(invert(pose_history), pose_key);
  ReferencePoints out = points;
  for (auto& p : out.points) p = key_to_history.apply(p);
  return out;
}

namespace {

void check_stack(std::span<const Matrix> stack, const TemporalParams& params) {
  if (stack.empty()) throw ShapeError("temporal fusion needs at least one frame");
  const std::size_t d = params.refine.in();
  if (stack.size() != params.frames() || params.gate.in() != stack.size() * d) {
    throw ShapeError("frame stack holds " + std::to_string(stack.size()) + " frames but the gate expects " +
                     std::to_string(params.frames()));
  }
  for (const auto& q : stack) {
    if (q.rows() != stack.back().rows() || static_cast<std::size_t>(q.cols()) != d) {
      throw ShapeError("every frame embedding must be K x D");
    }
  }
}

}  // namespace

Matrix temporal_gate(std::span<const Matrix> stack, const TemporalParams& params, std::optional<double> forced_logit) {
  check_stack(stack, params);
  const Eigen::Index k = stack.back().rows();
  const Eigen::Index d = stack.back().cols();
  Matrix gate(k, d);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (Eigen::Index i = 0; i < k; ++i) {
    Vector logits;
    if (forced_logit) {
      logits = Vector::Constant(d, *forced_logit);
    } else {
      Vector input(static_cast<Eigen::Index>(stack.size()) * d);
      for (std::size_t t = 0; t < stack.size(); ++t) {
        input.segment(static_cast<Eigen::Index>(t) * d, d) = stack[t].row(i).transpose();
      }
      logits = nn::mlp_forward(params.gate, input);
    }
    for (Eigen::Index c = 0; c < d; ++c) gate(i, c) = nn::sigmoid(logits[c]);
  }
  return gate;
}

Matrix temporal_modulate(const Matrix& key, const Matrix& gate) {
  if (key.rows() != gate.rows() || key.cols() != gate.cols()) throw ShapeError("gate and embedding differ in shape");
  return key + gate.cwiseProduct(key);
}

Matrix gtff(std::span<const Matrix> stack, const TemporalParams& params, std::optional<double> forced_logit) {
  const Matrix& key = stack.back();
  const Matrix gated = temporal_modulate(key, temporal_gate(stack, params, forced_logit));
  Matrix out(key.rows(), key.cols());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (Eigen::Index i = 0; i < key.rows(); ++i) {
    const Vector q = key.row(i).transpose();
    const Vector refined = q + nn::mlp_forward(params.refine, gated.row(i).transpose());
    out.row(i) = nn::layer_norm(refined, params.ln_gamma, params.ln_beta).transpose();
  }
  return out;
}

GaussianSet apply_refinement_head(const Matrix& embedding, const GaussianSet& gaussians, const HeadParams& head,
                                  const SceneConfig& cfg) {
  if (static_cast<std::size_t>(embedding.rows()) != gaussians.size()) {
    throw ShapeError("one embedding row per Gaussian is required");
  }
  if (head.mlp.out() != 11 + cfg.classes) throw ShapeError("refinement head output width mismatch");
  GaussianSet out(gaussians.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(gaussians.size()); ++si) {
    const auto i = static_cast<std::size_t>(si);
    const GaussianPrimitive& g = gaussians[i];
    const Vector raw = nn::mlp_forward(head.mlp, embedding.row(si).transpose());
    GaussianPrimitive& n = out[i];
    for (int a = 0; a < 3; ++a) {
      n.mean[a] = std::clamp(g.mean[a] + raw[a], cfg.range_min[a], cfg.range_max[a]);
      const double prev = std::max(g.scale[a] - kMinScale, 1e-12);
      n.scale[a] = kMinScale + nn::softplus(raw[3 + a] + nn::softplus_inverse(prev));
    }
    const double dw = 1.0 + raw[6], dx = raw[7], dy = raw[8], dz = raw[9];
    const bool degenerate = dw * dw + dx * dx + dy * dy + dz * dz < 1e-24;
    n.rotation = degenerate ? g.rotation : g.rotation * Quaternion(dw, dx, dy, dz);
    const double a_prev = std::clamp(g.opacity, 1e-6, 1.0 - 1e-6);
    n.opacity = nn::sigmoid(raw[10] + std::log(a_prev / (1.0 - a_prev)));
    n.logits = g.logits + raw.tail(static_cast<Eigen::Index>(cfg.classes));
  }
  return out;
}

bool satisfies_invariants(const GaussianPrimitive& g, const SceneConfig& cfg, std::string* why) {
  auto fail = [why](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (!g.mean.allFinite() || !g.scale.allFinite()) return fail("non-finite mean or scale");
  if ((g.scale.array() < kMinScale * (1.0 - 1e-12)).any()) return fail("scale below floor");
  if (!(g.opacity >= 0.0 && g.opacity <= 1.0)) return fail("opacity outside [0, 1]");
  for (int a = 0; a < 3; ++a) {
    if (g.mean[a] < cfg.range_min[a] || g.mean[a] > cfg.range_max[a]) return fail("mean outside perception range");
  }
  const double qn = std::sqrt(g.rotation.w() * g.rotation.w() + g.rotation.x() * g.rotation.x() +
                              g.rotation.y() * g.rotation.y() + g.rotation.z() * g.rotation.z());
  if (std::abs(qn - 1.0) > 1e-9) return fail("rotation quaternion not unit");
  if (static_cast<std::size_t>(g.logits.size()) != cfg.classes || !g.logits.allFinite()) return fail("bad logits");
  return true;
}

}  // namespace gaussocc
