#include "../helpers.hpp"
#include "../oracles.hpp"

#include "gaussocc/error.hpp"
#include "gaussocc/params.hpp"
#include "gaussocc/temporal.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace gaussocc;

namespace {

SceneConfig head_config(std::size_t classes) {
  SceneConfig cfg = testing::tiny_config();
  cfg.classes = classes;
  return cfg;
}

HeadParams random_head(Rng& rng, std::size_t d, std::size_t classes, double amp = 1.0) {
  HeadParams h;
  h.mlp = nn::Mlp({d, d, 11 + classes});
  h.mlp.init_uniform(rng);
  for (auto& l : h.mlp.layers) {
    l.weight *= amp;
    l.bias *= amp;
  }
  return h;
}

}  // namespace

TEST_SUITE("temporal") {

TEST_CASE("alignment matches the oracle") {
  Rng rng(41);
  for (int n = 0; n < 20; ++n) {
    const RigidTransform key = testing::random_pose(rng), hist = testing::random_pose(rng);
    ReferencePoints pts(1 + rng.below(16), 1 + rng.below(8));
    for (auto& p : pts.points) p = Vec3(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-3, 3));
    const ReferencePoints out = align_points(pts, key, hist);
    REQUIRE(out.points.size() == pts.points.size());
    for (std::size_t s = 0; s < pts.points.size(); ++s) {
      const auto ref = oracle::align(oracle::v3(pts.points[s]), key, hist);
      for (int a = 0; a < 3; ++a) CHECK(testing::rel_diff(out.points[s][a], ref[a]) <= 1e-12);
    }
  }
}

TEST_CASE("alignment is rigid and reduces to identity for equal poses") {
  Rng rng(42);
  for (int n = 0; n < 20; ++n) {
    const RigidTransform key = testing::random_pose(rng), hist = testing::random_pose(rng);
    ReferencePoints pts(6, 4);
    for (auto& p : pts.points) p = Vec3(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-3, 3));
    const ReferencePoints out = align_points(pts, key, hist);
    for (std::size_t a = 0; a < pts.points.size(); ++a) {
      for (std::size_t b = a + 1; b < pts.points.size(); ++b) {
        const double d0 = (pts.points[a] - pts.points[b]).norm(), d1 = (out.points[a] - out.points[b]).norm();
        CHECK(std::abs(d0 - d1) <= 1e-9);
      }
    }
    const ReferencePoints same = align_points(pts, key, key);
    for (std::size_t s = 0; s < pts.points.size(); ++s) CHECK((same.points[s] - pts.points[s]).norm() <= 1e-12);
  }
}

TEST_CASE("gated temporal fusion matches the oracle") {
  Rng rng(43);
  for (int n = 0; n < 20; ++n) {
    const std::size_t k = 1 + rng.below(16), d = 2 + rng.below(15), tau = 1 + rng.below(3);
    const TemporalParams p = testing::random_temporal(rng, d, tau);
    std::vector<Matrix> stack;
    for (std::size_t t = 0; t < tau; ++t) stack.push_back(testing::random_matrix(rng, k, d));
    const Matrix out = gtff(stack, p);
    const Matrix gate = temporal_gate(stack, p);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> lambda;
      const auto ref = oracle::gtff(stack, p, static_cast<Eigen::Index>(i), &lambda);
      for (std::size_t c = 0; c < d; ++c) {
        const auto ii = static_cast<Eigen::Index>(i), cc = static_cast<Eigen::Index>(c);
        CHECK(testing::rel_diff(out(ii, cc), ref[c]) <= 1e-10);
        CHECK(testing::rel_diff(gate(ii, cc), lambda[c]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("gate endpoints: zero gate keeps the keyframe, unit gate doubles it") {
  Rng rng(44);
  for (int n = 0; n < 10; ++n) {
    const std::size_t k = 1 + rng.below(16), d = 2 + rng.below(15), tau = 1 + rng.below(3);
    const TemporalParams p = testing::random_temporal(rng, d, tau);
    std::vector<Matrix> stack;
    for (std::size_t t = 0; t < tau; ++t) stack.push_back(testing::random_matrix(rng, k, d));
    const double inf = std::numeric_limits<double>::infinity();
    const Matrix zero = temporal_gate(stack, p, -inf), one = temporal_gate(stack, p, inf);
    CHECK((zero.array() == 0.0).all());
    CHECK((one.array() == 1.0).all());
    CHECK(temporal_modulate(stack.back(), zero) == stack.back());
    CHECK(temporal_modulate(stack.back(), one) == Matrix(2.0 * stack.back()));
  }
}

TEST_CASE("shape errors") {
  Rng rng(45);
  const TemporalParams p = testing::random_temporal(rng, 4, 2);
  std::vector<Matrix> three(3, Matrix::Zero(5, 4));
  CHECK_THROWS_AS(gtff(three, p), ShapeError);
  std::vector<Matrix> ragged{Matrix::Zero(5, 4), Matrix::Zero(6, 4)};
  CHECK_THROWS_AS(gtff(ragged, p), ShapeError);
  CHECK_THROWS_AS(temporal_modulate(Matrix::Zero(5, 4), Matrix::Zero(5, 3)), ShapeError);
}

TEST_CASE("refinement head keeps every invariant under large deltas") {
  Rng rng(46);
  const SceneConfig cfg = head_config(4);
  for (int n = 0; n < 20; ++n) {
    const std::size_t k = 1 + rng.below(16);
    GaussianSet gs;
    for (std::size_t i = 0; i < k; ++i) gs.push_back(testing::random_gaussian(rng, cfg.range_min, cfg.range_max, 4));
    const HeadParams head = random_head(rng, cfg.embed_dim, 4, 50.0);
    const Matrix q = testing::random_matrix(rng, k, cfg.embed_dim, 10.0);
    GaussianSet out = apply_refinement_head(q, gs, head, cfg);
    for (int step = 0; step < 5; ++step) out = apply_refinement_head(q, out, head, cfg);
    for (const auto& g : out) {
      std::string why;
      CHECK_MESSAGE(satisfies_invariants(g, cfg, &why), why);
    }
  }
}

TEST_CASE("a zero head leaves the Gaussians unchanged") {
  Rng rng(47);
  const SceneConfig cfg = head_config(3);
  GaussianSet gs;
  for (int i = 0; i < 10; ++i) gs.push_back(testing::random_gaussian(rng, cfg.range_min, cfg.range_max, 3));
  HeadParams head = random_head(rng, cfg.embed_dim, 3);
  head.mlp.set_zero();
  const GaussianSet out = apply_refinement_head(testing::random_matrix(rng, 10, cfg.embed_dim), gs, head, cfg);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    CHECK((out[i].mean - gs[i].mean).norm() == 0.0);
    CHECK((out[i].scale - gs[i].scale).norm() <= 1e-12);
    CHECK(out[i].rotation == gs[i].rotation * Quaternion(1.0, 0.0, 0.0, 0.0));
    CHECK(out[i].opacity == doctest::Approx(gs[i].opacity).epsilon(1e-12));
    CHECK(out[i].logits == gs[i].logits);
  }
}

TEST_CASE("refinement head clamps means to the perception range") {
  const SceneConfig cfg = head_config(2);
  GaussianPrimitive g;
  g.logits = Vector::Zero(2);
  HeadParams head;
  head.mlp = nn::Mlp({cfg.embed_dim, 13});
  head.mlp.layers[0].bias[0] = 1e6;
  head.mlp.layers[0].bias[1] = -1e6;
  const GaussianSet out = apply_refinement_head(Matrix::Zero(1, static_cast<Eigen::Index>(cfg.embed_dim)), {g}, head, cfg);
  CHECK(out[0].mean.x() == cfg.range_max.x());
  CHECK(out[0].mean.y() == cfg.range_min.y());
  CHECK(satisfies_invariants(out[0], cfg));
}

TEST_CASE("invariant checker rejects violations") {
  const SceneConfig cfg = head_config(2);
  GaussianPrimitive g;
  g.logits = Vector::Zero(2);
  CHECK(satisfies_invariants(g, cfg));
  GaussianPrimitive bad = g;
  bad.scale.x() = 0.001;
  CHECK_FALSE(satisfies_invariants(bad, cfg));
  bad = g;
  bad.opacity = 1.5;
  CHECK_FALSE(satisfies_invariants(bad, cfg));
  bad = g;
  bad.mean.z() = 100.0;
  CHECK_FALSE(satisfies_invariants(bad, cfg));
  bad = g;
  bad.logits = Vector::Zero(3);
  CHECK_FALSE(satisfies_invariants(bad, cfg));
}

}
