#include "gaussocc/gradcheck.hpp"

#include "gaussocc/losses.hpp"
#include "gaussocc/nn.hpp"
#include "gaussocc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gaussocc::nn {

double gradient_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

double central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                          Eigen::Index i, double h) {
  Vector xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

void GradAccumulator::check(const std::string& label, const std::function<double(const Vector&)>& f,
                            const Vector& x, const Vector& analytic, double h) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double err = gradient_error(analytic[i], central_difference(f, x, i, h));
    sum_ += err;
    ++report_.coordinates;
    if (err > report_.max_rel_error || report_.worst.empty()) {
      report_.max_rel_error = err;
      report_.worst = label + "[" + std::to_string(i) + "]";
    }
  }
}

GradReport GradAccumulator::finish() {
  report_.mean_rel_error = report_.coordinates ? sum_ / static_cast<double>(report_.coordinates) : 0.0;
  return report_;
}

namespace {

Vector random_vector(Rng& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unflatten(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

GradReport check_linear(Rng& rng, std::size_t probes, bool fault) {
  GradAccumulator acc("linear");
  for (std::size_t p = 0; p < probes; ++p) {
    LinearLayer layer(pick(rng, 2, 6), pick(rng, 2, 6));
    layer.init_uniform(rng);
    const Vector x = random_vector(rng, static_cast<Eigen::Index>(layer.in()));
    const Vector r = random_vector(rng, static_cast<Eigen::Index>(layer.out()));
    LinearGrad g;
    Vector dx = linear_backward(layer, x, r, &g);
    if (fault && p == 0) dx[0] += 1e-3;

    acc.check("input", [&](const Vector& v) { return r.dot(linear_forward(layer, v)); }, x, dx);
    acc.check(
        "weight",
        [&](const Vector& v) {
          LinearLayer l = layer;
          l.weight = unflatten(v, layer.weight.rows(), layer.weight.cols());
          return r.dot(linear_forward(l, x));
        },
        flatten(layer.weight), flatten(g.weight));
    acc.check(
        "bias",
        [&](const Vector& v) {
          LinearLayer l = layer;
          l.bias = v;
          return r.dot(linear_forward(l, x));
        },
        layer.bias, g.bias);
    acc.end_probe();
  }
  return acc.finish();
}

GradReport check_mlp(Rng& rng, std::size_t probes) {
  GradAccumulator acc("mlp");
  for (std::size_t p = 0; p < probes; ++p) {
    Mlp mlp;
    Vector x;
    MlpTape tape;
    // Resample away from ReLU kinks so central differences are valid.
    for (;;) {
      mlp = Mlp({pick(rng, 2, 6), pick(rng, 2, 8), pick(rng, 1, 5)});
      mlp.init_uniform(rng);
      x = random_vector(rng, static_cast<Eigen::Index>(mlp.in()));
      mlp_forward(mlp, x, &tape);
      if (tape.pre[0].cwiseAbs().minCoeff() >= 1e-4) break;
    }
    const Vector r = random_vector(rng, static_cast<Eigen::Index>(mlp.out()));
    const MlpGrad g = mlp_backward(mlp, tape, r);

    acc.check("input", [&](const Vector& v) { return r.dot(mlp_forward(mlp, v)); }, x, g.input);
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
      const auto& layer = mlp.layers[l];
      acc.check(
          "layer" + std::to_string(l) + ".weight",
          [&](const Vector& v) {
            Mlp m = mlp;
            m.layers[l].weight = unflatten(v, layer.weight.rows(), layer.weight.cols());
            return r.dot(mlp_forward(m, x));
          },
          flatten(layer.weight), flatten(g.layers[l].weight));
      acc.check(
          "layer" + std::to_string(l) + ".bias",
          [&](const Vector& v) {
            Mlp m = mlp;
            m.layers[l].bias = v;
            return r.dot(mlp_forward(m, x));
          },
          layer.bias, g.layers[l].bias);
    }
    acc.end_probe();
  }
  return acc.finish();
}

GradReport check_layer_norm(Rng& rng, std::size_t probes) {
  GradAccumulator acc("layer_norm");
  for (std::size_t p = 0; p < probes; ++p) {
    const auto d = static_cast<Eigen::Index>(pick(rng, 2, 16));
    const Vector x = random_vector(rng, d, -2.0, 2.0);
    const Vector gamma = random_vector(rng, d, 0.5, 1.5);
    const Vector beta = random_vector(rng, d);
    const Vector r = random_vector(rng, d);
    const LayerNormGrad g = layer_norm_backward(x, gamma, r);
    acc.check("input", [&](const Vector& v) { return r.dot(layer_norm(v, gamma, beta)); }, x, g.input);
    acc.check("gamma", [&](const Vector& v) { return r.dot(layer_norm(x, v, beta)); }, gamma, g.gamma);
    acc.check("beta", [&](const Vector& v) { return r.dot(layer_norm(x, gamma, v)); }, beta, g.beta);
    acc.end_probe();
  }
  return acc.finish();
}

GradReport check_sigmoid(Rng& rng, std::size_t probes) {
  GradAccumulator acc("sigmoid");
  for (std::size_t p = 0; p < probes; ++p) {
    const auto n = static_cast<Eigen::Index>(pick(rng, 1, 8));
    const Vector x = random_vector(rng, n, -6.0, 6.0);
    const Vector r = random_vector(rng, n);
    Vector dx(n);
    for (Eigen::Index i = 0; i < n; ++i) dx[i] = sigmoid_backward(sigmoid(x[i]), r[i]);
    acc.check(
        "input",
        [&](const Vector& v) {
          double s = 0.0;
          for (Eigen::Index i = 0; i < n; ++i) s += r[i] * sigmoid(v[i]);
          return s;
        },
        x, dx);
    acc.end_probe();
  }
  return acc.finish();
}

GradReport check_softmax(Rng& rng, std::size_t probes) {
  GradAccumulator acc("softmax");
  for (std::size_t p = 0; p < probes; ++p) {
    const auto n = static_cast<Eigen::Index>(pick(rng, 2, 8));
    const Vector x = random_vector(rng, n, -3.0, 3.0);
    const Vector r = random_vector(rng, n);
    const Vector dx = softmax_backward(softmax(x), r);
    acc.check("input", [&](const Vector& v) { return r.dot(softmax(v)); }, x, dx);
    acc.end_probe();
  }
  return acc.finish();
}

GradReport check_cross_entropy(Rng& rng, std::size_t probes) {
  GradAccumulator acc("cross_entropy");
  for (std::size_t p = 0; p < probes; ++p) {
    const auto rows = static_cast<Eigen::Index>(pick(rng, 1, 12));
    const auto cols = static_cast<Eigen::Index>(pick(rng, 2, 6));
    const Matrix scores = unflatten(random_vector(rng, rows * cols, -3.0, 3.0), rows, cols);
    std::vector<int> labels(static_cast<std::size_t>(rows));
    for (auto& l : labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(cols)));
    std::vector<double> weights(static_cast<std::size_t>(cols));
    for (auto& w : weights) w = rng.uniform(0.5, 2.0);
    const LossResult res = cross_entropy_loss(scores, labels, weights);
    acc.check(
        "scores",
        [&](const Vector& v) { return cross_entropy_loss(unflatten(v, rows, cols), labels, weights).value; },
        flatten(scores), flatten(res.gradient));
    acc.end_probe();
  }
  return acc.finish();
}

GradReport check_lovasz(Rng& rng, std::size_t probes) {
  GradAccumulator acc("lovasz_softmax");
  for (std::size_t p = 0; p < probes; ++p) {
    Matrix probs;
    std::vector<int> labels;
    Eigen::Index rows = 0, cols = 0;
    // Sorting makes the loss piecewise linear; keep errors well separated.
    for (bool ok = false; !ok;) {
      rows = static_cast<Eigen::Index>(pick(rng, 2, 20));
      cols = static_cast<Eigen::Index>(pick(rng, 2, 5));
      probs = softmax_rows(unflatten(random_vector(rng, rows * cols, -2.0, 2.0), rows, cols));
      labels.assign(static_cast<std::size_t>(rows), 0);
      for (auto& l : labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(cols)));
      ok = true;
      for (Eigen::Index c = 0; c < cols && ok; ++c) {
        std::vector<double> e;
        for (Eigen::Index i = 0; i < rows; ++i) {
          e.push_back(std::abs((labels[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0) - probs(i, c)));
        }
        std::sort(e.begin(), e.end());
        for (std::size_t i = 1; i < e.size(); ++i) ok = ok && e[i] - e[i - 1] > 1e-4;
      }
    }
    const LossResult res = lovasz_softmax_loss(probs, labels);
    acc.check(
        "probs",
        [&](const Vector& v) { return lovasz_softmax_loss(unflatten(v, rows, cols), labels).value; },
        flatten(probs), flatten(res.gradient));
    acc.end_probe();
  }
  return acc.finish();
}

}  // namespace

std::vector<GradReport> run_gradcheck_suite(const GradcheckOptions& opts) {
  const Rng root(opts.seed);
  std::vector<GradReport> reports;
  Rng r0 = root.split(0), r1 = root.split(1), r2 = root.split(2), r3 = root.split(3), r4 = root.split(4),
      r5 = root.split(5), r6 = root.split(6);
  reports.push_back(check_linear(r0, opts.probes, opts.inject_fault));
  reports.push_back(check_mlp(r1, opts.probes));
  reports.push_back(check_layer_norm(r2, opts.probes));
  reports.push_back(check_sigmoid(r3, opts.probes));
  reports.push_back(check_softmax(r4, opts.probes));
  reports.push_back(check_cross_entropy(r5, opts.probes));
  reports.push_back(check_lovasz(r6, opts.probes));
  return reports;
}

std::string format_grad_table(const std::vector<GradReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %7s %8s %12s %12s  %-20s %s\n", "primitive", "probes", "coords",
                "max_rel", "mean_rel", "worst", "status");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-16s %7zu %8zu %12.3e %12.3e  %-20s %s\n", r.name.c_str(), r.probes,
                  r.coordinates, r.max_rel_error, r.mean_rel_error, r.worst.c_str(), r.passed() ? "ok" : "FAIL");
    out << line;
  }
  return out.str();
}

}  // namespace gaussocc::nn
