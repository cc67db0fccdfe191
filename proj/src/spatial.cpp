#include "gaussocc/spatial.hpp"

#include "gaussocc/error.hpp"
#include "gaussocc/nn.hpp"
#include "gaussocc/parallel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gaussocc {

std::vector<Vec3> gga_proposal_grid(std::size_t samples) {
  std::size_t n = 1;
  while (n * n * n < samples) ++n;
  auto coord = [n](std::size_t idx) {
    return n == 1 ? 0.0 : -0.5 + static_cast<double>(idx) / static_cast<double>(n - 1);
  };
  std::vector<Vec3> grid;
  grid.reserve(samples);
  for (std::size_t p = 0; p < samples; ++p) {
    grid.emplace_back(coord(p % n), coord((p / n) % n), coord(p / (n * n)));
  }
  return grid;
}

std::vector<Vec3> vga_proposal_grid(std::size_t samples) {
  std::size_t cols = 1;
  while (cols * cols < samples) ++cols;
  const std::size_t rows = (samples + cols - 1) / cols;
  std::vector<Vec3> grid;
  grid.reserve(samples);
  for (std::size_t p = 0; p < samples; ++p) {
    const double y = static_cast<double>(p % cols) - 0.5 * static_cast<double>(cols - 1);
    const double z = static_cast<double>(p / cols) - 0.5 * static_cast<double>(rows - 1);
    grid.emplace_back(0.0, y, z);
  }
  return grid;
}

OffsetSet context_offset(const Matrix& embedding, const SpatialParams& params) {
  const std::size_t k = static_cast<std::size_t>(embedding.rows());
  const std::size_t m = params.samples();
  if (static_cast<std::size_t>(embedding.cols()) != params.offset.in()) {
    throw ShapeError("embedding width does not match the offset predictor");
  }
  OffsetSet out(k, m);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(k); ++i) {
    const Vector y = nn::linear_forward(params.offset, embedding.row(i).transpose());
    for (std::size_t p = 0; p < m; ++p) {
      out.at(static_cast<std::size_t>(i), p) = y.segment<3>(static_cast<Eigen::Index>(3 * p));
    }
  }
  return out;
}

std::vector<Vec3> gga_offsets(const GaussianPrimitive& g, std::span<const Vec3> context, double scale_factor,
                              std::span<const Vec3> proposal) {
  if (context.size() != proposal.size()) throw ShapeError("context offsets and proposal grid differ in size");
  const Mat3 rs = quat_to_rotation(g.rotation) * g.scale.asDiagonal();
  std::vector<Vec3> out(proposal.size());
  for (std::size_t p = 0; p < proposal.size(); ++p) {
    out[p] = rs * (scale_factor * proposal[p] + context[p]);
  }
  return out;
}

std::vector<Vec3> gga_offsets(const GaussianPrimitive& g, const Vector& embedding_row, const SpatialParams& params) {
  Matrix q(1, embedding_row.size());
  q.row(0) = embedding_row.transpose();
  const OffsetSet ctx = context_offset(q, params);
  return gga_offsets(g, ctx.row(0), params.scale_gga, gga_proposal_grid(params.samples()));
}

Mat3 azimuth_rotation(const Vec3& mean) {
  const double theta = (mean.x() == 0.0 && mean.y() == 0.0) ? 0.0 : std::atan2(mean.y(), mean.x());
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 r;
  r << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

std::vector<Vec3> vga_offsets(const GaussianPrimitive& g, std::span<const Vec3> context, double scale_factor,
                              std::span<const Vec3> proposal) {
  if (context.size() != proposal.size()) throw ShapeError("context offsets and proposal grid differ in size");
  const Mat3 r = azimuth_rotation(g.mean);
  std::vector<Vec3> out(proposal.size());
  for (std::size_t p = 0; p < proposal.size(); ++p) {
    out[p] = r * (scale_factor * proposal[p] + context[p]);
  }
  return out;
}

std::vector<Vec3> vga_offsets(const GaussianPrimitive& g, const Vector& embedding_row, const SpatialParams& params) {
  Matrix q(1, embedding_row.size());
  q.row(0) = embedding_row.transpose();
  const OffsetSet ctx = context_offset(q, params);
  return vga_offsets(g, ctx.row(0), params.scale_vga, vga_proposal_grid(params.samples()));
}

double gate_logit(const Vec3& gga, const Vec3& vga, const Vec3& ctx, const SpatialParams& params) {
  Vector features(static_cast<Eigen::Index>(3 * kGateLatent));
  features << nn::linear_forward(params.gate_gga, gga), nn::linear_forward(params.gate_vga, vga),
      nn::linear_forward(params.gate_ctx, ctx);
  return nn::linear_forward(params.gate_out, features)[0];
}

OffsetSet gsfa_fuse(const OffsetSet& gga, const OffsetSet& vga, const OffsetSet& ctx, const SpatialParams& params,
                    std::optional<double> forced_logit, Matrix* gate) {
  if (gga.points.size() != vga.points.size() || gga.points.size() != ctx.points.size() ||
      gga.samples != vga.samples || gga.samples != ctx.samples) {
    throw ShapeError("GSFA inputs must share the K x M x 3 shape");
  }
  OffsetSet out(gga.gaussians, gga.samples);
  if (gate) gate->resize(static_cast<Eigen::Index>(gga.gaussians), static_cast<Eigen::Index>(gga.samples));
  const auto n = static_cast<std::ptrdiff_t>(gga.points.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    const double logit = forced_logit ? *forced_logit : gate_logit(gga.points[idx], vga.points[idx], ctx.points[idx], params);
    const double lambda = nn::sigmoid(logit);
    out.points[idx] = lambda * gga.points[idx] + (1.0 - lambda) * vga.points[idx];
    if (gate) gate->data()[s] = lambda;
  }
  return out;
}

ReferencePoints reference_points(std::span<const Vec3> means, const OffsetSet& offsets) {
  if (means.size() != offsets.gaussians) throw ShapeError("one mean per Gaussian is required");
  ReferencePoints out(offsets.gaussians, offsets.samples);
  for (std::size_t i = 0; i < offsets.gaussians; ++i) {
    for (std::size_t m = 0; m < offsets.samples; ++m) out.at(i, m) = means[i] + offsets.at(i, m);
  }
  return out;
}

ProjectedPoints warp(const ReferencePoints& points, const Camera& camera) {
  ProjectedPoints out;
  out.gaussians = points.gaussians;
  out.samples = points.samples;
  out.pixels.resize(points.points.size());
  out.visible.assign(points.points.size(), 0);
  const auto& k = camera.intrinsics;
  const double w = static_cast<double>(camera.width), h = static_cast<double>(camera.height);
  for (std::size_t s = 0; s < points.points.size(); ++s) {
    const Vec3 p = camera.extrinsics.apply(points.points[s]);
    if (!(p.z() > kNearPlane)) {
      out.pixels[s].setZero();
      continue;
    }
    const double u = k.fx * p.x() / p.z() + k.cx;
    const double v = k.fy * p.y() / p.z() + k.cy;
    out.pixels[s] = {u, v};
    out.visible[s] = (u >= 0.0 && u < w && v >= 0.0 && v < h) ? 1 : 0;
  }
  return out;
}

Vector bilinear_sample(const FeaturePlane& plane, double u, double v) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(plane.channels));
  const double u0f = std::floor(u), v0f = std::floor(v);
  const double fu = u - u0f, fv = v - v0f;
  const double taps[4][3] = {{u0f, v0f, (1.0 - fu) * (1.0 - fv)},
                             {u0f + 1.0, v0f, fu * (1.0 - fv)},
                             {u0f, v0f + 1.0, (1.0 - fu) * fv},
                             {u0f + 1.0, v0f + 1.0, fu * fv}};
  for (const auto& t : taps) {
    if (t[2] == 0.0) continue;
    if (t[0] < 0.0 || t[1] < 0.0 || t[0] >= static_cast<double>(plane.width) ||
        t[1] >= static_cast<double>(plane.height)) {
      continue;
    }
    const auto texel = plane.texel(static_cast<std::size_t>(t[0]), static_cast<std::size_t>(t[1]));
    for (std::size_t c = 0; c < plane.channels; ++c) out[static_cast<Eigen::Index>(c)] += t[2] * texel[c];
  }
  return out;
}

Matrix deform_attn(const Matrix& embedding, std::span<const Camera> cameras, std::span<const ProjectedPoints> projected,
                   const SpatialParams& params, AttentionTrace* trace) {
  const std::size_t k = static_cast<std::size_t>(embedding.rows());
  const std::size_t d = static_cast<std::size_t>(embedding.cols());
  const std::size_t m = params.samples();
  if (cameras.size() != projected.size()) throw ShapeError("one projection per camera is required");
  if (cameras.empty()) throw ShapeError("deformable attention needs at least one camera");
  const std::size_t levels = cameras.front().pyramid.size();
  for (std::size_t n = 0; n < cameras.size(); ++n) {
    if (cameras[n].pyramid.size() != levels) throw ShapeError("cameras must share the pyramid depth");
    for (const auto& plane : cameras[n].pyramid) {
      if (plane.channels != d) throw ShapeError("feature channels must equal the embedding width");
    }
    if (projected[n].gaussians != k || projected[n].samples != m) throw ShapeError("projection shape mismatch");
  }
  const std::size_t slots = cameras.size() * levels * m;
  if (params.attn_weights.out() != slots) {
    throw ShapeError("attention weight layer has " + std::to_string(params.attn_weights.out()) + " slots, expected " +
                     std::to_string(slots));
  }
  if (params.attn_output.in() != d || params.attn_output.out() != d) throw ShapeError("attention output must be D -> D");

  Matrix out = embedding;
  if (trace) trace->weights.assign(k, std::vector<double>(slots, 0.0));

#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(k); ++si) {
    const auto i = static_cast<std::size_t>(si);
    const Vector q = embedding.row(si).transpose();
    const Vector logits = nn::linear_forward(params.attn_weights, q);

    double max_logit = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t n = 0; n < cameras.size(); ++n) {
      for (std::size_t p = 0; p < m; ++p) {
        if (!projected[n].visible[i * m + p]) continue;
        any = true;
        for (std::size_t l = 0; l < levels; ++l) {
          max_logit = std::max(max_logit, logits[static_cast<Eigen::Index>((n * levels + l) * m + p)]);
        }
      }
    }
    if (!any) continue;

    std::vector<double> weights(slots, 0.0);
    double total = 0.0;
    for (std::size_t n = 0; n < cameras.size(); ++n) {
      for (std::size_t l = 0; l < levels; ++l) {
        for (std::size_t p = 0; p < m; ++p) {
          if (!projected[n].visible[i * m + p]) continue;
          const std::size_t s = (n * levels + l) * m + p;
          weights[s] = std::exp(logits[static_cast<Eigen::Index>(s)] - max_logit);
          total += weights[s];
        }
      }
    }
    Vector aggregated = Vector::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t n = 0; n < cameras.size(); ++n) {
      for (std::size_t l = 0; l < levels; ++l) {
        const FeaturePlane& plane = cameras[n].pyramid[l];
        for (std::size_t p = 0; p < m; ++p) {
          const std::size_t s = (n * levels + l) * m + p;
          if (!projected[n].visible[i * m + p]) continue;
          weights[s] /= total;
          const Eigen::Vector2d uv = pixel_to_level(plane, projected[n].pixels[i * m + p]);
          aggregated += weights[s] * bilinear_sample(plane, uv.x(), uv.y());
        }
      }
    }
    out.row(si) += nn::linear_forward(params.attn_output, aggregated).transpose();
    if (trace) trace->weights[i] = std::move(weights);
  }
  return out;
}

ReferencePoints gisa_reference_points(const Matrix& embedding, const GaussianSet& gaussians,
                                      const SpatialParams& params) {
  const std::size_t k = gaussians.size();
  if (static_cast<std::size_t>(embedding.rows()) != k) throw ShapeError("one embedding row per Gaussian is required");
  const std::size_t m = params.samples();
  const OffsetSet ctx = context_offset(embedding, params);
  const auto gga_grid = gga_proposal_grid(m);
  const auto vga_grid = vga_proposal_grid(m);
  OffsetSet gga(k, m), vga(k, m);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(k); ++si) {
    const auto i = static_cast<std::size_t>(si);
    const auto g = gga_offsets(gaussians[i], ctx.row(i), params.scale_gga, gga_grid);
    const auto v = vga_offsets(gaussians[i], ctx.row(i), params.scale_vga, vga_grid);
    for (std::size_t p = 0; p < m; ++p) {
      gga.at(i, p) = g[p];
      vga.at(i, p) = v[p];
    }
  }
  const OffsetSet fused = gsfa_fuse(gga, vga, ctx, params);
  std::vector<Vec3> means(k);
  for (std::size_t i = 0; i < k; ++i) means[i] = gaussians[i].mean;
  return reference_points(means, fused);
}

GisaResult gisa_block(const Matrix& embedding, const GaussianSet& gaussians, std::span<const Camera> rig,
                      const SpatialParams& params) {
  GisaResult res;
  res.points = gisa_reference_points(embedding, gaussians, params);
  std::vector<ProjectedPoints> projected;
  projected.reserve(rig.size());
  for (const auto& cam : rig) projected.push_back(warp(res.points, cam));
  res.embedding = deform_attn(embedding, rig, projected, params);
  return res;
}

}  // namespace gaussocc
