#pragma once

#include "gaussocc/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gaussocc {

/// One level of a feature pyramid: width x height texels of `channels`
/// values, channel-last storage.
struct FeaturePlane {
  std::size_t width = 0, height = 0, channels = 0;
  std::size_t ratio = 1;  ///< downsample ratio relative to the image
  std::vector<double> data;

  FeaturePlane() = default;
  FeaturePlane(std::size_t w, std::size_t h, std::size_t c, std::size_t r)
      : width(w), height(h), channels(c), ratio(r), data(w * h * c, 0.0) {}

  std::span<const double> texel(std::size_t u, std::size_t v) const {
    return {data.data() + (v * width + u) * channels, channels};
  }
  std::span<double> texel(std::size_t u, std::size_t v) {
    return {data.data() + (v * width + u) * channels, channels};
  }
};

struct Intrinsics {
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
  bool operator==(const Intrinsics&) const = default;
};

/// Pinhole camera. Camera frame: x right, y down, z along the optical axis.
struct Camera {
  Intrinsics intrinsics;
  RigidTransform extrinsics;  ///< perception frame -> camera frame
  std::size_t width = 0, height = 0;
  std::vector<FeaturePlane> pyramid;

  /// Throws ConfigError/ShapeError when fx, fy <= 0 or a level's size is not
  /// ceil(image / ratio).
  void validate() const;
};

using CameraRig = std::vector<Camera>;

/// Level size for an image dimension and ratio (rounded up).
constexpr std::size_t level_size(std::size_t image, std::size_t ratio) {
  return (image + ratio - 1) / ratio;
}

/// `count` cameras evenly spaced in yaw around the ego origin, mounted at
/// `height` above the perception origin, looking horizontally outward.
CameraRig make_surround_rig(std::size_t count, std::size_t width, std::size_t height,
                            double horizontal_fov, double mount_height);

/// Procedural stand-in for backbone features: every channel is a sum of two
/// low-frequency sinusoids with per-(seed, channel) frequencies and phases.
FeaturePlane make_feature_plane(std::size_t image_w, std::size_t image_h, std::size_t ratio,
                                std::size_t channels, std::uint64_t seed);

/// One plane per ratio, seeded from `seed`.
std::vector<FeaturePlane> make_feature_pyramid(std::size_t image_w, std::size_t image_h,
                                               std::span<const std::size_t> ratios,
                                               std::size_t channels, std::uint64_t seed);

/// Default ratios, finest first: {4, 8, 16, 32} truncated to `levels`.
std::vector<std::size_t> default_ratios(std::size_t levels);

}  // namespace gaussocc
