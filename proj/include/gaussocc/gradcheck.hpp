#pragma once

#include "gaussocc/geometry.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gaussocc::nn {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kGradTolerance = 1e-6;

struct GradReport {
  std::string name;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  std::string worst;  ///< coordinate with the largest error, e.g. "weight[3]"
  std::size_t probes = 0;
  std::size_t coordinates = 0;

  bool passed(double tol = kGradTolerance) const { return max_rel_error < tol; }
};

/// |analytic - numeric| / max(1, |analytic|, |numeric|).
double gradient_error(double analytic, double numeric);

/// Central difference of f at x along coordinate i.
double central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                          Eigen::Index i, double h = kFdStep);

/// Accumulates per-coordinate errors into a report.
class GradAccumulator {
 public:
  explicit GradAccumulator(std::string name) { report_.name = std::move(name); }

  /// Compares `analytic` against central differences of f at x; `label`
  /// names the block of coordinates.
  void check(const std::string& label, const std::function<double(const Vector&)>& f, const Vector& x,
             const Vector& analytic, double h = kFdStep);
  void end_probe() { ++report_.probes; }

  GradReport finish();

 private:
  GradReport report_;
  double sum_ = 0.0;
};

struct GradcheckOptions {
  std::uint64_t seed = 7;
  std::size_t probes = 100;
  /// Perturb one analytic gradient so the suite must fail.
  bool inject_fault = false;
};

/// Finite-difference suites for every primitive: linear, mlp, layer_norm,
/// sigmoid, softmax, cross_entropy, lovasz_softmax (one report each).
std::vector<GradReport> run_gradcheck_suite(const GradcheckOptions& opts);

/// Fixed-width text table, one row per report.
std::string format_grad_table(const std::vector<GradReport>& reports);

}  // namespace gaussocc::nn
