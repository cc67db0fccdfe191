#include "gaussocc/synth.hpp"

#include "gaussocc/error.hpp"
#include "gaussocc/io.hpp"
#include "gaussocc/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace gaussocc {
namespace {

constexpr double kFrameInterval = 0.5;
constexpr double kCameraFov = 1.3;
constexpr double kCameraMount = 0.0;

RigidTransform yaw_pose(double yaw, const Vec3& t) {
  return {Quaternion::from_axis_angle(Vec3::UnitZ(), yaw), t};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t feature_seed(std::uint64_t seed, std::size_t frame, std::size_t camera) {
  return Rng(seed).split(0xfea7).split(frame).split(camera).next_u64();
}

}  // namespace

std::string_view to_string(Recipe r) { return r == Recipe::Ground ? "ground" : "urban"; }

Recipe parse_recipe(std::string_view name) {
  if (name == "ground") return Recipe::Ground;
  if (name == "urban") return Recipe::Urban;
  throw ConfigError("unknown scene recipe '" + std::string(name) + "' (expected ground or urban)");
}

bool ScenePrimitive::contains(const Vec3& p, double t) const {
  const Vec3 c = center + velocity * t;
  const double a = yaw + yaw_rate * t;
  const double ca = std::cos(a), sa = std::sin(a);
  const Vec3 d = p - c;
  const Vec3 local(ca * d.x() + sa * d.y(), -sa * d.x() + ca * d.y(), d.z());
  if (shape == Shape::Box) {
    return std::abs(local.x()) <= half_extent.x() && std::abs(local.y()) <= half_extent.y() &&
           std::abs(local.z()) <= half_extent.z();
  }
  return local.cwiseQuotient(half_extent).squaredNorm() <= 1.0;
}

std::uint8_t label_at(const SyntheticScene& scene, const Vec3& p, double t) {
  if (scene.ground && p.z() <= scene.ground->top) return scene.ground->label;
  for (const auto& prim : scene.primitives) {
    if (prim.contains(p, t)) return prim.label;
  }
  return kEmptyLabel;
}

SyntheticScene make_scene(const SceneConfig& cfg, std::uint64_t seed, std::size_t frames, Recipe recipe) {
  cfg.validate();
  if (frames == 0) throw ConfigError("a scene needs at least one frame");
  if (recipe == Recipe::Urban && cfg.classes < 2) throw ConfigError("the urban recipe needs at least two classes");

  SyntheticScene scene;
  scene.config = cfg;
  scene.recipe = recipe;
  scene.seed = seed;
  scene.ground = GroundPlane{cfg.range_min.z() + cfg.voxel_size, 0};

  Rng rng(seed);
  Rng ego = rng.split(1);
  const double speed = recipe == Recipe::Ground ? 0.0 : ego.uniform(1.0, 4.0);
  const double yaw_rate = recipe == Recipe::Ground ? 0.0 : ego.uniform(-0.2, 0.2);
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = kFrameInterval * static_cast<double>(f);
    const double yaw = yaw_rate * t;
    const Vec3 position = std::abs(yaw_rate) < 1e-12
                              ? Vec3(speed * t, 0.0, 0.0)
                              : Vec3(speed / yaw_rate * std::sin(yaw), speed / yaw_rate * (1.0 - std::cos(yaw)), 0.0);
    scene.timestamps.push_back(t);
    scene.poses.push_back(yaw_pose(yaw, position));
  }

  if (recipe == Recipe::Urban) {
    Rng objects = rng.split(2);
    const double floor = scene.ground->top;
    const Vec3 lo = cfg.range_min, hi = cfg.range_max;
    const double h_max = hi.z() - floor;
    const std::size_t count = 10 + objects.below(11);
    for (std::size_t n = 0; n < count; ++n) {
      ScenePrimitive p;
      p.shape = objects.uniform() < 0.7 ? ScenePrimitive::Shape::Box : ScenePrimitive::Shape::Ellipsoid;
      p.half_extent = Vec3(objects.uniform(0.5, 3.0), objects.uniform(0.5, 3.0),
                           objects.uniform(0.25, 0.5) * h_max);
      p.center = Vec3(objects.uniform(lo.x(), hi.x()), objects.uniform(lo.y(), hi.y()), floor + p.half_extent.z());
      p.yaw = objects.uniform(-std::numbers::pi, std::numbers::pi);
      if (objects.uniform() < 0.3) {
        const double heading = objects.uniform(-std::numbers::pi, std::numbers::pi);
        const double v = objects.uniform(0.5, 3.0);
        p.velocity = Vec3(v * std::cos(heading), v * std::sin(heading), 0.0);
        p.yaw_rate = objects.uniform(-0.3, 0.3);
      }
      p.label = static_cast<std::uint8_t>(1 + objects.below(cfg.classes - 1));
      scene.primitives.push_back(p);
    }
  }

  scene.rig = make_surround_rig(cfg.cameras, cfg.image_width, cfg.image_height, kCameraFov, kCameraMount);
  const auto ratios = default_ratios(cfg.levels);
  for (auto& cam : scene.rig) {
    for (const auto r : ratios) {
      FeaturePlane level;
      level.ratio = r;
      cam.pyramid.push_back(std::move(level));
    }
  }
  for (std::size_t f = 0; f < frames; ++f) {
    scene.ground_truth.push_back(voxelize(scene, f));
    std::vector<std::vector<FeaturePlane>> per_camera;
    for (std::size_t c = 0; c < cfg.cameras; ++c) {
      per_camera.push_back(make_feature_pyramid(cfg.image_width, cfg.image_height, ratios, cfg.embed_dim,
                                                feature_seed(seed, f, c)));
    }
    scene.features.push_back(std::move(per_camera));
  }
  return scene;
}

LabelGrid voxelize(const SyntheticScene& scene, std::size_t frame) {
  const GridSpec g = scene.config.grid();
  LabelGrid out(g, scene.config.classes);
  const RigidTransform& pose = scene.poses.at(frame);
  const double t = scene.timestamps.at(frame);
  for (std::size_t v = 0; v < out.labels.size(); ++v) {
    const VoxelIndex idx = g.unravel(v);
    out.labels[v] = label_at(scene, pose.apply(voxel_center_unchecked(g, idx.i, idx.j, idx.k)), t);
  }
  return out;
}

GaussianSet random_gaussians(const GridSpec& grid, std::size_t count, std::size_t classes, Rng& rng) {
  grid.validate();
  const Vec3 lo = grid.origin, hi = grid.origin + grid.extent();
  GaussianSet out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    GaussianPrimitive g;
    for (int a = 0; a < 3; ++a) g.mean[a] = rng.uniform(lo[a], hi[a]);
    for (int a = 0; a < 3; ++a) g.scale[a] = rng.uniform(0.5, 3.0) * grid.voxel_size;
    const double w = rng.normal(), x = rng.normal(), y = rng.normal(), z = rng.normal();
    g.rotation = Quaternion(w, x, y, z);
    g.opacity = rng.uniform(0.05, 1.0);
    g.logits.resize(static_cast<Eigen::Index>(classes));
    for (Eigen::Index c = 0; c < g.logits.size(); ++c) g.logits[c] = rng.uniform(-1.0, 1.0);
    out.push_back(std::move(g));
  }
  return out;
}

std::string frame_file_name(std::string_view prefix, std::size_t frame, std::string_view extension) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", frame);
  return std::string(prefix) + "_" + buf + std::string(extension);
}

void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw std::runtime_error("cannot create scene directory " + dir.string());

  io::write_file(dir / "config.txt", format_config(scene.config));
  io::write_file(dir / "scene.txt", "recipe " + std::string(to_string(scene.recipe)) + "\nseed " +
                                        std::to_string(scene.seed) + "\nframes " +
                                        std::to_string(scene.frame_count()) + "\n");

  std::string prims = "# ground top label\n# box|ellipsoid cx cy cz hx hy hz yaw vx vy vz yaw_rate label\n";
  if (scene.ground) prims += "ground " + fmt(scene.ground->top) + ' ' + std::to_string(scene.ground->label) + "\n";
  for (const auto& p : scene.primitives) {
    prims += p.shape == ScenePrimitive::Shape::Box ? "box" : "ellipsoid";
    for (const double v : {p.center.x(), p.center.y(), p.center.z(), p.half_extent.x(), p.half_extent.y(),
                           p.half_extent.z(), p.yaw, p.velocity.x(), p.velocity.y(), p.velocity.z(), p.yaw_rate}) {
      prims += ' ' + fmt(v);
    }
    prims += ' ' + std::to_string(p.label) + "\n";
  }
  io::write_file(dir / "primitives.txt", prims);

  std::vector<io::PoseRecord> poses;
  for (std::size_t f = 0; f < scene.frame_count(); ++f) {
    poses.push_back({scene.timestamps[f], Quaternion::from_rotation(scene.poses[f].rotation()),
                     scene.poses[f].translation()});
  }
  io::write_file(dir / "poses.txt", io::format_pose_log(poses));
  io::write_file(dir / "rig.txt", io::format_rig(scene.rig));
  for (std::size_t f = 0; f < scene.frame_count(); ++f) {
    io::write_voxel_grid(dir / frame_file_name("gt", f, ".occ"), scene.ground_truth[f]);
    for (std::size_t c = 0; c < scene.features[f].size(); ++c) {
      char name[32];
      std::snprintf(name, sizeof name, "feat_%04zu_%02zu.bin", f, c);
      io::write_file(dir / name, io::encode_feature_pyramid(scene.features[f][c]));
    }
  }
}

LoadedScene load_scene(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("scene directory " + dir.string() + " not found");
  LoadedScene scene;
  scene.config = parse_config(io::read_file(dir / "config.txt"), (dir / "config.txt").string());
  for (const auto& p : io::parse_pose_log(io::read_file(dir / "poses.txt"), (dir / "poses.txt").string())) {
    scene.poses.push_back(p.transform());
    scene.timestamps.push_back(p.timestamp);
  }
  scene.rig = io::parse_rig(io::read_file(dir / "rig.txt"), (dir / "rig.txt").string());
  if (scene.rig.size() != scene.config.cameras) throw ShapeError("rig.txt camera count does not match config.txt");
  const GridSpec grid = scene.config.grid();
  for (std::size_t f = 0; f < scene.frame_count(); ++f) {
    const auto path = dir / frame_file_name("gt", f, ".occ");
    if (std::filesystem::exists(path)) {
      LabelGrid gt = io::read_voxel_grid(path);
      if (!(gt.spec == grid) || gt.num_classes != scene.config.classes) {
        throw ShapeError(path.string() + " does not match the grid in config.txt");
      }
      scene.ground_truth.push_back(std::move(gt));
    }
    std::vector<std::vector<FeaturePlane>> per_camera;
    for (std::size_t c = 0; c < scene.rig.size(); ++c) {
      char name[32];
      std::snprintf(name, sizeof name, "feat_%04zu_%02zu.bin", f, c);
      const auto fpath = dir / name;
      auto pyramid = io::decode_feature_pyramid(io::read_file(fpath), fpath.string());
      if (pyramid.size() != scene.rig[c].pyramid.size()) {
        throw ShapeError(fpath.string() + " level count does not match rig.txt");
      }
      for (std::size_t l = 0; l < pyramid.size(); ++l) {
        if (pyramid[l].ratio != scene.rig[c].pyramid[l].ratio) {
          throw ShapeError(fpath.string() + " level ratio does not match rig.txt");
        }
      }
      per_camera.push_back(std::move(pyramid));
    }
    scene.features.push_back(std::move(per_camera));
  }
  if (!scene.ground_truth.empty() && scene.ground_truth.size() != scene.frame_count()) {
    throw ShapeError("scene directory " + dir.string() + " has ground truth for only some frames");
  }
  return scene;
}

FrameSequence make_window(const LoadedScene& scene, std::size_t key, std::size_t tau) {
  if (key >= scene.frame_count()) throw std::out_of_range("keyframe index outside the scene");
  if (tau == 0) throw ConfigError("temporal window must hold at least one frame");
  FrameSequence seq;
  for (std::size_t w = 0; w < tau; ++w) {
    const std::size_t back = tau - 1 - w;
    const std::size_t f = key >= back ? key - back : 0;
    Frame frame;
    frame.pose = scene.poses[f];
    frame.rig = scene.rig;
    for (std::size_t c = 0; c < frame.rig.size(); ++c) frame.rig[c].pyramid = scene.features[f][c];
    if (!scene.ground_truth.empty()) frame.ground_truth = scene.ground_truth[f];
    if (w + 1 < tau) frame.ground_truth.reset();
    seq.frames.push_back(std::move(frame));
  }
  for (const auto& cam : seq.frames.back().rig) cam.validate();
  return seq;
}

}  // namespace gaussocc
