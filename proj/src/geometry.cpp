#include "gaussocc/geometry.hpp"

#include "gaussocc/error.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <limits>

namespace gaussocc {

Quaternion::Quaternion(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {
  const double n2 = w * w + x * x + y * y + z * z;
  if (!std::isfinite(n2) || n2 == 0.0) {
    throw DegenerateInput("quaternion must be finite and non-zero");
  }
  // Leave already-unit input untouched so save/load cycles are bit-stable.
  if (std::abs(n2 - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    const double n = std::sqrt(n2);
    w_ /= n;
    x_ /= n;
    y_ /= n;
    z_ /= n;
  }
}

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw DegenerateInput("rotation axis must be non-zero");
  const Vec3 a = axis / n;
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), a.x() * s, a.y() * s, a.z() * s};
}

Quaternion Quaternion::from_rotation(const Mat3& r) {
  Eigen::Quaterniond q(r);
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {q.w(), q.x(), q.y(), q.z()};
}

Quaternion Quaternion::operator*(const Quaternion& b) const {
  return {w_ * b.w_ - x_ * b.x_ - y_ * b.y_ - z_ * b.z_,
          w_ * b.x_ + x_ * b.w_ + y_ * b.z_ - z_ * b.y_,
          w_ * b.y_ - x_ * b.z_ + y_ * b.w_ + z_ * b.x_,
          w_ * b.z_ + x_ * b.y_ - y_ * b.x_ + z_ * b.w_};
}

Mat3 quat_to_rotation(const Quaternion& q) {
  return Eigen::Quaterniond(q.w(), q.x(), q.y(), q.z()).normalized().toRotationMatrix();
}

Mat3 covariance(const Vec3& scale, const Quaternion& q) {
  if (!(scale.array() > 0.0).all()) {
    throw DegenerateInput("Gaussian scale components must be strictly positive");
  }
  const Mat3 rs = quat_to_rotation(q) * scale.asDiagonal();
  Mat3 sigma = rs * rs.transpose();
  // Symmetric by construction up to rounding; make it exactly so.
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return sigma;
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  constexpr double kTol = 1e-9;
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw DegenerateInput("rigid transform must be finite");
  }
  if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > kTol ||
      std::abs(rotation.determinant() - 1.0) > kTol) {
    throw DegenerateInput("rigid transform rotation must be orthonormal with det +1");
  }
}

RigidTransform::RigidTransform(const Quaternion& q, const Vec3& translation)
    : rotation_(quat_to_rotation(q)), translation_(translation) {
  if (!translation.allFinite()) throw DegenerateInput("rigid transform must be finite");
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation()};
}

RigidTransform invert(const RigidTransform& a) {
  const Mat3 rt = a.rotation().transpose();
  return {rt, -(rt * a.translation())};
}

}  // namespace gaussocc
