#pragma once

#include <Eigen/Core>

#include <vector>

namespace gaussocc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector = Eigen::VectorXd;
/// Row-major so that per-Gaussian rows of a K x D embedding are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Unit quaternion, (w, x, y, z) Hamilton convention.
class Quaternion {
 public:
  Quaternion() = default;
  /// Normalizes; throws DegenerateInput for a zero or non-finite quaternion.
  Quaternion(double w, double x, double y, double z);

  static Quaternion identity() { return {}; }
  static Quaternion from_axis_angle(const Vec3& axis, double angle);
  static Quaternion from_rotation(const Mat3& r);

  double w() const noexcept { return w_; }
  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }

  Quaternion operator*(const Quaternion& rhs) const;
  Quaternion operator-() const { return Quaternion(-w_, -x_, -y_, -z_); }
  Quaternion conjugate() const { return Quaternion(w_, -x_, -y_, -z_); }

  bool operator==(const Quaternion&) const = default;

 private:
  double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

/// Rotation matrix of q (normalizing first).
Mat3 quat_to_rotation(const Quaternion& q);

/// Sigma = R S S^T R^T with S = diag(scale). Throws DegenerateInput on a
/// non-positive scale component.
Mat3 covariance(const Vec3& scale, const Quaternion& q);

/// x' = R x + t.
class RigidTransform {
 public:
  RigidTransform() = default;
  /// Throws DegenerateInput when `rotation` is not orthonormal with det +1.
  RigidTransform(const Mat3& rotation, const Vec3& translation);
  RigidTransform(const Quaternion& q, const Vec3& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform translation(const Vec3& t) { return {Mat3::Identity(), t}; }

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 apply_direction(const Vec3& v) const { return rotation_ * v; }

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
};

/// compose(a, b).apply(p) == a.apply(b.apply(p)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& a);
inline Vec3 apply(const RigidTransform& a, const Vec3& p) { return a.apply(p); }

/// One anisotropic semantic ellipsoid.
struct GaussianPrimitive {
  Vec3 mean = Vec3::Zero();
  Vec3 scale = Vec3::Ones();
  Quaternion rotation;
  double opacity = 1.0;
  Vector logits;
};

using GaussianSet = std::vector<GaussianPrimitive>;

}  // namespace gaussocc
