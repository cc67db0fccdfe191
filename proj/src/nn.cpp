#include "gaussocc/nn.hpp"

#include "gaussocc/error.hpp"

#include <cmath>
#include <string>

namespace gaussocc::nn {

void LinearLayer::init_uniform(Rng& rng) {
  const double a = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(in(), 1)));
  for (Eigen::Index r = 0; r < weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < weight.cols(); ++c) weight(r, c) = rng.uniform(-a, a);
  }
  for (Eigen::Index r = 0; r < bias.size(); ++r) bias[r] = rng.uniform(-a, a);
}

void LinearLayer::set_zero() {
  weight.setZero();
  bias.setZero();
}

Vector linear_forward(const LinearLayer& layer, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != layer.in()) {
    throw ShapeError("linear layer expects " + std::to_string(layer.in()) + " inputs, got " +
                     std::to_string(x.size()));
  }
  return layer.weight * x + layer.bias;
}

Vector linear_backward(const LinearLayer& layer, const Vector& x, const Vector& dy, LinearGrad* grad) {
  if (static_cast<std::size_t>(dy.size()) != layer.out() || static_cast<std::size_t>(x.size()) != layer.in()) {
    throw ShapeError("linear backward shape mismatch");
  }
  if (grad) {
    if (grad->weight.size() == 0) {
      grad->weight = Matrix::Zero(layer.weight.rows(), layer.weight.cols());
      grad->bias = Vector::Zero(layer.bias.size());
    }
    grad->weight.noalias() += dy * x.transpose();
    grad->bias += dy;
  }
  return layer.weight.transpose() * dy;
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

Mlp::Mlp(const std::vector<std::size_t>& widths, Activation act) : hidden(act) {
  if (widths.size() < 2) throw ShapeError("an MLP needs at least input and output widths");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) layers.emplace_back(widths[l], widths[l + 1]);
}

void Mlp::init_uniform(Rng& rng) {
  for (auto& l : layers) l.init_uniform(rng);
}

void Mlp::set_zero() {
  for (auto& l : layers) l.set_zero();
}

Vector mlp_forward(const Mlp& mlp, const Vector& x, MlpTape* tape) {
  if (tape) {
    tape->inputs.clear();
    tape->pre.clear();
  }
  Vector h = x;
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    if (l > 0 && mlp.layers[l].in() != mlp.layers[l - 1].out()) {
      throw ShapeError("MLP layer " + std::to_string(l) + " width chain is inconsistent");
    }
    if (tape) tape->inputs.push_back(h);
    Vector z = linear_forward(mlp.layers[l], h);
    if (tape) tape->pre.push_back(z);
    const bool last = l + 1 == mlp.layers.size();
    if (!last && mlp.hidden == Activation::Relu) z = z.unaryExpr([](double v) { return relu(v); });
    h = std::move(z);
  }
  return h;
}

MlpGrad mlp_backward(const Mlp& mlp, const MlpTape& tape, const Vector& dy) {
  if (tape.inputs.size() != mlp.layers.size()) throw ShapeError("MLP tape does not match network");
  MlpGrad g;
  g.layers.resize(mlp.layers.size());
  Vector d = dy;
  for (std::size_t l = mlp.layers.size(); l-- > 0;) {
    const bool last = l + 1 == mlp.layers.size();
    if (!last && mlp.hidden == Activation::Relu) {
      // Subgradient convention: derivative 0 at exactly 0.
      for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(tape.pre[l][i] > 0.0)) d[i] = 0.0;
      }
    }
    d = linear_backward(mlp.layers[l], tape.inputs[l], d, &g.layers[l]);
  }
  g.input = std::move(d);
  return g;
}

Vector layer_norm(const Vector& x, const Vector& gamma, const Vector& beta, double eps) {
  if (x.size() < 2 || gamma.size() != x.size() || beta.size() != x.size()) {
    throw ShapeError("layer norm needs D >= 2 and matching affine sizes");
  }
  const double mean = x.mean();
  const Vector centered = x.array() - mean;
  const double var = centered.squaredNorm() / static_cast<double>(x.size());
  const double inv_std = 1.0 / std::sqrt(var + eps);
  return (centered * inv_std).cwiseProduct(gamma) + beta;
}

LayerNormGrad layer_norm_backward(const Vector& x, const Vector& gamma, const Vector& dy, double eps) {
  const double n = static_cast<double>(x.size());
  const double mean = x.mean();
  const Vector centered = x.array() - mean;
  const double var = centered.squaredNorm() / n;
  const double inv_std = 1.0 / std::sqrt(var + eps);
  const Vector xhat = centered * inv_std;
  LayerNormGrad g;
  g.beta = dy;
  g.gamma = dy.cwiseProduct(xhat);
  const Vector dxhat = dy.cwiseProduct(gamma);
  g.input = inv_std * (dxhat.array() - dxhat.mean() - xhat.array() * dxhat.dot(xhat) / n).matrix();
  return g;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double softplus_inverse(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

Vector softmax(const Vector& x) {
  const double m = x.maxCoeff();
  Vector e = (x.array() - m).exp();
  return e / e.sum();
}

Vector softmax_backward(const Vector& y, const Vector& dy) {
  return y.cwiseProduct((dy.array() - y.dot(dy)).matrix());
}

}  // namespace gaussocc::nn
