#pragma once

#include "gaussocc/geometry.hpp"
#include "gaussocc/rng.hpp"

#include <cstddef>
#include <vector>

namespace gaussocc::nn {

/// y = W x + b, W is out x in.
struct LinearLayer {
  Matrix weight;
  Vector bias;

  LinearLayer() = default;
  LinearLayer(std::size_t in, std::size_t out)
      : weight(Matrix::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in))),
        bias(Vector::Zero(static_cast<Eigen::Index>(out))) {}

  std::size_t in() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out() const { return static_cast<std::size_t>(weight.rows()); }

  /// Uniform(-a, a) with a = 1/sqrt(fan_in) for weight and bias.
  void init_uniform(Rng& rng);
  void set_zero();
};

struct LinearGrad {
  Matrix weight;
  Vector bias;
};

/// Throws ShapeError when x does not have `in()` entries.
Vector linear_forward(const LinearLayer& layer, const Vector& x);

/// Returns dL/dx; accumulates dL/dW, dL/db into `grad` when non-null
/// (it is resized and zeroed if empty).
Vector linear_backward(const LinearLayer& layer, const Vector& x, const Vector& dy, LinearGrad* grad);

enum class Activation { Relu, Identity };

double relu(double x);

/// Affine layers with `hidden` activation between them and none at the output.
struct Mlp {
  std::vector<LinearLayer> layers;
  Activation hidden = Activation::Relu;

  Mlp() = default;
  /// widths = {in, h1, ..., out}.
  explicit Mlp(const std::vector<std::size_t>& widths, Activation act = Activation::Relu);

  std::size_t in() const { return layers.front().in(); }
  std::size_t out() const { return layers.back().out(); }

  void init_uniform(Rng& rng);
  void set_zero();
};

/// Intermediate values kept by the forward pass for backward.
struct MlpTape {
  std::vector<Vector> inputs;  ///< input to layer l
  std::vector<Vector> pre;     ///< pre-activation of layer l
};

struct MlpGrad {
  Vector input;
  std::vector<LinearGrad> layers;
};

/// Throws ShapeError on an inconsistent width chain.
Vector mlp_forward(const Mlp& mlp, const Vector& x, MlpTape* tape = nullptr);
MlpGrad mlp_backward(const Mlp& mlp, const MlpTape& tape, const Vector& dy);

inline constexpr double kLayerNormEps = 1e-5;

/// (x - mean) / sqrt(var + eps) * gamma + beta, population variance over D.
Vector layer_norm(const Vector& x, const Vector& gamma, const Vector& beta, double eps = kLayerNormEps);

struct LayerNormGrad {
  Vector input, gamma, beta;
};

LayerNormGrad layer_norm_backward(const Vector& x, const Vector& gamma, const Vector& dy,
                                  double eps = kLayerNormEps);

/// Overflow-safe for any input including +-infinity.
double sigmoid(double x);
/// dL/dx given s = sigmoid(x).
inline double sigmoid_backward(double s, double dy) { return dy * s * (1.0 - s); }

double softplus(double x);
/// Inverse of softplus on (0, inf).
double softplus_inverse(double y);

/// Max-subtracted softmax.
Vector softmax(const Vector& x);
/// dL/dx given y = softmax(x) and dL/dy.
Vector softmax_backward(const Vector& y, const Vector& dy);

}  // namespace gaussocc::nn
