#pragma once

#include "gaussocc/camera.hpp"
#include "gaussocc/config.hpp"
#include "gaussocc/geometry.hpp"
#include "gaussocc/grid.hpp"
#include "gaussocc/pipeline.hpp"
#include "gaussocc/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaussocc {

enum class Recipe { Ground, Urban };

std::string_view to_string(Recipe r);
/// Throws ConfigError for an unknown name.
Recipe parse_recipe(std::string_view name);

/// Box or ellipsoid in the world frame, moving at constant velocity and yaw
/// rate. `half_extent` is the box half size or the ellipsoid radii.
struct ScenePrimitive {
  enum class Shape { Box, Ellipsoid } shape = Shape::Box;
  Vec3 center = Vec3::Zero();
  Vec3 half_extent = Vec3::Ones();
  double yaw = 0.0;
  Vec3 velocity = Vec3::Zero();
  double yaw_rate = 0.0;
  std::uint8_t label = 0;

  /// Whether world point p lies inside the shape at time t (boundary inclusive).
  bool contains(const Vec3& p, double t) const;
};

/// Half space z <= top, in the world frame.
struct GroundPlane {
  double top = 0.0;
  std::uint8_t label = 0;
};

struct SyntheticScene {
  SceneConfig config;
  Recipe recipe = Recipe::Ground;
  std::uint64_t seed = 0;
  std::optional<GroundPlane> ground;
  std::vector<ScenePrimitive> primitives;
  std::vector<double> timestamps;
  std::vector<RigidTransform> poses;  ///< perception -> world, per frame
  CameraRig rig;                      ///< without features
  std::vector<LabelGrid> ground_truth;
  /// features[frame][camera]: one pyramid per camera.
  std::vector<std::vector<std::vector<FeaturePlane>>> features;

  std::size_t frame_count() const { return poses.size(); }
};

/// Label of world point p at time t: the ground plane first, then the
/// first primitive in list order that contains it; kEmptyLabel otherwise.
std::uint8_t label_at(const SyntheticScene& scene, const Vec3& p, double t);

/// Deterministic in (cfg, seed, frames, recipe). The ego drives forward with
/// a constant yaw rate on the ground plane. The ground plane's top sits one
/// voxel above the grid floor, so it fills exactly the bottom slab.
/// Throws ConfigError for fewer than two classes with the urban recipe or
/// zero frames.
SyntheticScene make_scene(const SceneConfig& cfg, std::uint64_t seed, std::size_t frames, Recipe recipe);

/// Center-containment voxelization of one frame.
LabelGrid voxelize(const SyntheticScene& scene, std::size_t frame);

/// Writes config.txt, scene.txt, primitives.txt, poses.txt, rig.txt,
/// gt_XXXX.occ and feat_XXXX_YY.bin. Throws std::runtime_error when the
/// directory cannot be created or written.
void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir);

/// What `pipeline` and `eval` need from a scene directory.
struct LoadedScene {
  SceneConfig config;
  std::vector<RigidTransform> poses;
  std::vector<double> timestamps;
  CameraRig rig;
  std::vector<LabelGrid> ground_truth;
  std::vector<std::vector<std::vector<FeaturePlane>>> features;

  std::size_t frame_count() const { return poses.size(); }
};

LoadedScene load_scene(const std::filesystem::path& dir);

/// The `tau` frames ending at `key` (oldest first), repeating the first
/// frame of the scene where the window runs past the start.
FrameSequence make_window(const LoadedScene& scene, std::size_t key, std::size_t tau);

/// `count` Gaussians with means uniform over the grid, scales uniform in
/// [0.5, 3] voxels per axis, uniformly random rotations, opacity in
/// [0.05, 1] and logits in [-1, 1]. Used by the splat benchmarks and tests.
GaussianSet random_gaussians(const GridSpec& grid, std::size_t count, std::size_t classes, Rng& rng);

/// "gt_0003.occ" style names.
std::string frame_file_name(std::string_view prefix, std::size_t frame, std::string_view extension);

}  // namespace gaussocc
