#include "gaussocc/camera.hpp"

#include "gaussocc/error.hpp"
#include "gaussocc/rng.hpp"

#include <cmath>
#include <numbers>

namespace gaussocc {

void Camera::validate() const {
  if (!(intrinsics.fx > 0.0) || !(intrinsics.fy > 0.0)) {
    throw ConfigError("camera focal lengths must be positive");
  }
  if (width == 0 || height == 0) throw ConfigError("camera image size must be positive");
  for (const auto& level : pyramid) {
    if (level.ratio == 0 || level.width != level_size(width, level.ratio) ||
        level.height != level_size(height, level.ratio)) {
      throw ShapeError("feature level size must equal image size / ratio, rounded up");
    }
    if (level.data.size() != level.width * level.height * level.channels) {
      throw ShapeError("feature level payload size mismatch");
    }
  }
}

CameraRig make_surround_rig(std::size_t count, std::size_t width, std::size_t height,
                            double horizontal_fov, double mount_height) {
  CameraRig rig(count);
  const double fx = 0.5 * static_cast<double>(width) / std::tan(0.5 * horizontal_fov);
  for (std::size_t n = 0; n < count; ++n) {
    const double yaw = 2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(count);
    const Vec3 forward(std::cos(yaw), std::sin(yaw), 0.0);
    const Vec3 right(std::sin(yaw), -std::cos(yaw), 0.0);
    const Vec3 down(0.0, 0.0, -1.0);
    Mat3 r;
    r.row(0) = right.transpose();
    r.row(1) = down.transpose();
    r.row(2) = forward.transpose();
    const Vec3 center(0.0, 0.0, mount_height);
    Camera& cam = rig[n];
    cam.intrinsics = {fx, fx, 0.5 * static_cast<double>(width), 0.5 * static_cast<double>(height)};
    cam.extrinsics = RigidTransform(r, -(r * center));
    cam.width = width;
    cam.height = height;
  }
  return rig;
}

FeaturePlane make_feature_plane(std::size_t image_w, std::size_t image_h, std::size_t ratio,
                                std::size_t channels, std::uint64_t seed) {
  FeaturePlane plane(level_size(image_w, ratio), level_size(image_h, ratio), channels, ratio);
  Rng rng(seed);
  struct Wave {
    double ku, kv, phase, amp;
  };
  std::vector<Wave> waves(2 * channels);
  for (auto& w : waves) {
    // At most ~1.5 periods across the plane keeps the field smooth.
    w.ku = rng.uniform(-3.0, 3.0) * std::numbers::pi / static_cast<double>(plane.width);
    w.kv = rng.uniform(-3.0, 3.0) * std::numbers::pi / static_cast<double>(plane.height);
    w.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    w.amp = rng.uniform(0.25, 1.0);
  }
  for (std::size_t v = 0; v < plane.height; ++v) {
    for (std::size_t u = 0; u < plane.width; ++u) {
      auto texel = plane.texel(u, v);
      for (std::size_t c = 0; c < channels; ++c) {
        double value = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
          const Wave& w = waves[2 * c + j];
          value += w.amp * std::sin(w.ku * static_cast<double>(u) + w.kv * static_cast<double>(v) + w.phase);
        }
        texel[c] = value;
      }
    }
  }
  return plane;
}

std::vector<FeaturePlane> make_feature_pyramid(std::size_t image_w, std::size_t image_h,
                                               std::span<const std::size_t> ratios,
                                               std::size_t channels, std::uint64_t seed) {
  std::vector<FeaturePlane> pyramid;
  pyramid.reserve(ratios.size());
  Rng rng(seed);
  for (std::size_t l = 0; l < ratios.size(); ++l) {
    pyramid.push_back(make_feature_plane(image_w, image_h, ratios[l], channels, rng.split(l).next_u64()));
  }
  return pyramid;
}

std::vector<std::size_t> default_ratios(std::size_t levels) {
  std::vector<std::size_t> ratios;
  std::size_t r = 4;
  for (std::size_t l = 0; l < levels; ++l, r *= 2) ratios.push_back(r);
  return ratios;
}

}  // namespace gaussocc
