#include "gaussocc/config.hpp"
#include "gaussocc/error.hpp"
#include "gaussocc/gradcheck.hpp"
#include "gaussocc/io.hpp"
#include "gaussocc/metrics.hpp"
#include "gaussocc/parallel.hpp"
#include "gaussocc/params.hpp"
#include "gaussocc/pipeline.hpp"
#include "gaussocc/rng.hpp"
#include "gaussocc/splat.hpp"
#include "gaussocc/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gaussocc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SceneConfig load_config(const std::string& path) {
  if (path.empty()) return SceneConfig{};
  return parse_config(io::read_file(path), path);
}

/// Fields that have to agree between a scene and the config running on it.
void check_scene_config(const SceneConfig& scene, const SceneConfig& cfg) {
  auto fail = [](const std::string& field) {
    throw ConfigError("config/scene mismatch: " + field + " differs from the scene's config.txt");
  };
  if (!(scene.grid() == cfg.grid())) fail("grid (range_min, dims, voxel_size)");
  if (scene.classes != cfg.classes) fail("classes");
  if (scene.cameras != cfg.cameras) fail("cameras");
  if (scene.levels != cfg.levels) fail("levels");
  if (scene.image_width != cfg.image_width || scene.image_height != cfg.image_height) fail("image size");
  if (scene.embed_dim != cfg.embed_dim) fail("embed_dim (feature channels)");
}

std::vector<fs::path> frame_files(const fs::path& dir, const std::string& prefix) {
  std::vector<fs::path> out;
  for (std::size_t f = 0;; ++f) {
    const fs::path p = dir / frame_file_name(prefix, f, ".occ");
    if (!fs::exists(p)) break;
    out.push_back(p);
  }
  if (out.empty()) throw std::runtime_error("no " + prefix + "_XXXX.occ files in " + dir.string());
  return out;
}

std::vector<RigidTransform> read_poses(const fs::path& dir) {
  const fs::path p = dir / "poses.txt";
  std::vector<RigidTransform> out;
  for (const auto& rec : io::parse_pose_log(io::read_file(p), p.string())) out.push_back(rec.transform());
  return out;
}

void check_same_dims(const LabelGrid& a, const fs::path& pa, const LabelGrid& b, const fs::path& pb) {
  if (a.spec.dims != b.spec.dims || a.num_classes != b.num_classes) {
    throw ShapeError("grid dims or class count differ between " + pa.string() + " and " + pb.string());
  }
}

struct Loaded {
  std::vector<LabelGrid> grids;
  std::vector<fs::path> paths;
};

Loaded load_frames(const fs::path& dir, const std::string& prefix) {
  Loaded out;
  out.paths = frame_files(dir, prefix);
  for (const auto& p : out.paths) {
    out.grids.push_back(io::read_voxel_grid(p));
    if (out.grids.size() > 1) check_same_dims(out.grids.front(), out.paths.front(), out.grids.back(), p);
  }
  return out;
}

/// Prediction frames, or the ground truth of a scene directory.
Loaded load_predictions(const fs::path& dir) {
  return load_frames(dir, fs::exists(dir / frame_file_name("pred", 0, ".occ")) ? "pred" : "gt");
}

StcvResult sequence_stcv(const Loaded& frames, const fs::path& dir, bool align) {
  if (frames.grids.size() < 2) return {};
  if (!align) return stcv(frames.grids);
  const auto poses = read_poses(dir);
  if (poses.size() != frames.grids.size()) {
    throw ShapeError((dir / "poses.txt").string() + " has " + std::to_string(poses.size()) + " poses for " +
                     std::to_string(frames.grids.size()) + " frames");
  }
  return stcv(frames.grids, poses);
}

int cmd_synth(std::uint64_t seed, std::size_t frames, const std::string& recipe, const std::string& config,
              const std::string& out) {
  SceneConfig cfg = load_config(config);
  const SyntheticScene scene = make_scene(cfg, seed, frames, parse_recipe(recipe));
  write_scene(scene, out);
  std::cerr << "wrote " << frames << " frames to " << out << "\n";
  return 0;
}

struct SplatArgs {
  std::string gaussians, config, out;
  std::vector<std::size_t> grid;
  std::vector<double> origin;
  double voxel_size = 0.0;
  double cutoff = 3.0;
  double threshold = kDefaultOccupancyThreshold;
  bool dense = false;
};

int cmd_splat(const SplatArgs& a) {
  const SceneConfig cfg = load_config(a.config);
  GridSpec grid = cfg.grid();
  if (!a.grid.empty()) grid.dims = {a.grid[0], a.grid[1], a.grid[2]};
  if (!a.origin.empty()) grid.origin = Vec3(a.origin[0], a.origin[1], a.origin[2]);
  if (a.voxel_size > 0.0) grid.voxel_size = a.voxel_size;
  grid.validate();

  const std::string text = io::read_file(a.gaussians);
  const GaussianSet gaussians = io::parse_gaussians(text, a.gaussians);
  std::size_t classes = io::gaussian_header_classes(text);
  if (classes == 0 && !gaussians.empty()) classes = static_cast<std::size_t>(gaussians.front().logits.size());
  if (classes == 0) classes = cfg.classes;
  const auto start = Clock::now();
  const SplatOutput s = a.dense ? splat_dense(gaussians, grid, classes, a.threshold)
                                : splat_bounded(gaussians, grid, classes, a.cutoff, a.threshold);
  std::cerr << (a.dense ? "dense" : "bounded") << " splat of " << gaussians.size() << " Gaussians: "
            << seconds_since(start) << " s\n";
  io::write_voxel_grid(a.out, s.labels);
  return 0;
}

struct PipelineArgs {
  std::string scene, config, mode, out;
  std::size_t frames = 0;
  std::int64_t seed = -1;
  int threads = 0;
};

int cmd_pipeline(const PipelineArgs& a) {
  if (a.threads > 0) set_threads(a.threads);
  const LoadedScene scene = load_scene(a.scene);
  SceneConfig cfg = a.config.empty() ? scene.config : load_config(a.config);
  if (!a.mode.empty()) cfg.fusion_mode = parse_fusion_mode(a.mode);
  if (a.frames > 0) cfg.frames = a.frames;
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  cfg.validate();
  check_scene_config(scene.config, cfg);

  Rng rng(cfg.seed);
  const ParamStore params = init_parameters(cfg, rng);
  fs::create_directories(a.out);
  const fs::path out(a.out);

  std::string summary = format_config(cfg);
  double total = 0.0;
  for (std::size_t f = 0; f < scene.frame_count(); ++f) {
    const auto start = Clock::now();
    const FrameSequence window = make_window(scene, f, cfg.frames);
    const PipelineResult r = run_pipeline(window, cfg, params);
    const double dt = seconds_since(start);
    total += dt;
    io::write_voxel_grid(out / frame_file_name("pred", f, ".occ"), r.occupancy.labels);
    io::write_file(out / frame_file_name("gaussians", f, ".txt"), io::format_gaussians(r.gaussians, cfg.classes));
    summary += "frame " + std::to_string(f) + " loss " + fmt(r.total_loss) + "\n";
    std::cerr << "frame " << f << ": " << dt << " s\n";
  }
  io::write_file(out / "poses.txt", io::read_file(fs::path(a.scene) / "poses.txt"));
  io::write_file(out / "summary.txt", summary);
  std::cerr << "pipeline: " << scene.frame_count() << " frames, " << total << " s total, " << thread_count()
            << " threads\n";
  return 0;
}

int cmd_eval(const std::string& pred_dir, const std::string& gt_dir, bool align, const std::string& out) {
  const Loaded pred = load_predictions(pred_dir);
  const Loaded gt = load_frames(gt_dir, "gt");
  if (pred.grids.size() != gt.grids.size()) {
    throw ShapeError(pred_dir + " has " + std::to_string(pred.grids.size()) + " frames but " + gt_dir + " has " +
                     std::to_string(gt.grids.size()));
  }
  ConfusionCounts counts;
  for (std::size_t f = 0; f < pred.grids.size(); ++f) {
    check_same_dims(pred.grids[f], pred.paths[f], gt.grids[f], gt.paths[f]);
    counts += confusion(pred.grids[f], gt.grids[f]);
  }
  std::optional<StcvResult> temporal;
  if (pred.grids.size() >= 2) temporal = sequence_stcv(pred, pred_dir, align);
  const std::string report = io::format_metrics_report(counts, pred.grids.size(), temporal);
  std::cout << report;
  if (!out.empty()) io::write_file(out, report);
  return 0;
}

int cmd_stcv(const std::vector<std::string>& dirs, bool align, const std::string& out) {
  std::vector<double> values;
  std::size_t flagged = 0;
  for (const auto& d : dirs) {
    const Loaded frames = load_predictions(d);
    if (frames.grids.size() < 2) throw std::invalid_argument(d + ": STCV needs at least two frames");
    const StcvResult r = sequence_stcv(frames, d, align);
    values.push_back(r.value);
    flagged += r.flagged_pairs;
  }
  StcvReport report = stcv_aggregate(values);
  report.flagged_pairs = flagged;
  const std::string text = io::format_stcv_report(report);
  std::cout << text;
  if (!out.empty()) io::write_file(out, text);
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, std::size_t probes, bool fault) {
  nn::GradcheckOptions opts;
  opts.seed = seed;
  opts.probes = probes;
  opts.inject_fault = fault;
  const auto reports = nn::run_gradcheck_suite(opts);
  std::cout << nn::format_grad_table(reports);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.passed();
  std::cout << (ok ? "all gradients match\n" : "gradient check FAILED\n");
  return ok ? 0 : 1;
}

struct BenchArgs {
  std::size_t gaussians = 25600;
  std::vector<std::size_t> grid{200, 200, 16};
  double voxel_size = 0.5;
  std::size_t classes = 16;
  int threads = 0;
  double cutoff = 3.0;
  std::uint64_t seed = 1;
  bool serial = false;
};

int cmd_bench(const BenchArgs& a) {
  if (a.threads > 0) set_threads(a.threads);
  GridSpec grid;
  grid.dims = {a.grid[0], a.grid[1], a.grid[2]};
  grid.voxel_size = a.voxel_size;
  grid.origin = -0.5 * grid.extent();
  grid.validate();
  Rng rng(a.seed);
  const GaussianSet gaussians = random_gaussians(grid, a.gaussians, a.classes, rng);

  auto start = Clock::now();
  const SplatOutput bounded = splat_bounded(gaussians, grid, a.classes, a.cutoff);
  const double t_bounded = seconds_since(start);
  start = Clock::now();
  const SplatOutput dense = splat_dense(gaussians, grid, a.classes);
  const double t_dense = seconds_since(start);
  double t_serial = 0.0;
  if (a.serial) {
    start = Clock::now();
    (void)reference::splat_serial(gaussians, grid, a.classes);
    t_serial = seconds_since(start);
  }

  double max_abs = 0.0, max_err = 0.0;
  for (std::size_t i = 0; i < dense.logits.values.size(); ++i) {
    max_abs = std::max(max_abs, std::abs(dense.logits.values[i]));
    max_err = std::max(max_err, std::abs(dense.logits.values[i] - bounded.logits.values[i]));
  }
  std::size_t differ = 0;
  for (std::size_t v = 0; v < dense.labels.labels.size(); ++v) differ += dense.labels.labels[v] != bounded.labels.labels[v];
  const double disagreement = static_cast<double>(differ) / static_cast<double>(grid.voxel_count());
  const bool equal = disagreement <= 1e-3;

  std::printf("gaussians %zu\ngrid %zu %zu %zu\nthreads %d\ncutoff_sigma %g\n", a.gaussians, grid.dims[0],
              grid.dims[1], grid.dims[2], thread_count(), a.cutoff);
  std::printf("bounded_seconds %.6f\ndense_seconds %.6f\n", t_bounded, t_dense);
  if (a.serial) std::printf("serial_seconds %.6f\n", t_serial);
  std::printf("speedup %.2f\n", t_dense / std::max(t_bounded, 1e-9));
  std::printf("bounded_evaluations %zu\ndense_evaluations %zu\n", bounded.evaluations, dense.evaluations);
  std::printf("label_disagreement %.6g\nmax_logit_error %.6g\nmax_logit_error_relative %.6g\n", disagreement,
              max_err, max_abs > 0.0 ? max_err / max_abs : 0.0);
  std::printf("equality %s\n", equal ? "pass" : "fail");
  if (t_dense / std::max(t_bounded, 1e-9) < 5.0) std::fprintf(stderr, "note: speedup below the 5x soft target\n");
  return equal ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian semantic occupancy toolkit"};
  app.require_subcommand(1);

  std::uint64_t synth_seed = 1;
  std::size_t synth_frames = 3;
  std::string synth_recipe = "urban", synth_config, synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene directory");
  synth->add_option("--seed", synth_seed);
  synth->add_option("--frames", synth_frames)->check(CLI::PositiveNumber);
  synth->add_option("--recipe", synth_recipe)->check(CLI::IsMember({"ground", "urban"}));
  synth->add_option("--config", synth_config, "scene config file")->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out)->required();

  SplatArgs splat_args;
  auto* splat = app.add_subcommand("splat", "splat a Gaussian file into a label grid");
  splat->add_option("--gaussians", splat_args.gaussians)->required()->check(CLI::ExistingFile);
  splat->add_option("--config", splat_args.config, "take the grid from a config file")->check(CLI::ExistingFile);
  splat->add_option("--grid", splat_args.grid)->expected(3);
  splat->add_option("--origin", splat_args.origin)->expected(3);
  splat->add_option("--voxel-size", splat_args.voxel_size);
  splat->add_option("--cutoff", splat_args.cutoff);
  splat->add_option("--threshold", splat_args.threshold);
  splat->add_flag("--dense", splat_args.dense, "evaluate every Gaussian at every voxel");
  splat->add_option("--out", splat_args.out)->required();

  PipelineArgs pipe_args;
  auto* pipeline = app.add_subcommand("pipeline", "run the occupancy pipeline on a scene");
  pipeline->add_option("--scene", pipe_args.scene)->required()->check(CLI::ExistingDirectory);
  pipeline->add_option("--config", pipe_args.config)->check(CLI::ExistingFile);
  pipeline->add_option("--mode", pipe_args.mode)->check(CLI::IsMember({"loose", "tight", "coupled"}));
  pipeline->add_option("--frames", pipe_args.frames, "temporal window length");
  pipeline->add_option("--seed", pipe_args.seed, "parameter seed");
  pipeline->add_option("--threads", pipe_args.threads);
  pipeline->add_option("--out", pipe_args.out)->required();

  std::string eval_pred, eval_gt, eval_out;
  bool eval_align = false;
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  eval->add_option("--pred", eval_pred)->required()->check(CLI::ExistingDirectory);
  eval->add_option("--gt", eval_gt)->required()->check(CLI::ExistingDirectory);
  eval->add_flag("--align", eval_align, "resample frames by ego pose before STCV");
  eval->add_option("--out", eval_out);

  std::vector<std::string> stcv_dirs;
  bool stcv_align = false;
  std::string stcv_out;
  auto* stcv_cmd = app.add_subcommand("stcv", "temporal label variability of prediction sequences");
  stcv_cmd->add_option("--pred", stcv_dirs, "one directory per scene")->required()->check(CLI::ExistingDirectory);
  stcv_cmd->add_flag("--align", stcv_align, "resample frames by ego pose");
  stcv_cmd->add_option("--out", stcv_out);

  std::uint64_t grad_seed = 7;
  std::size_t grad_probes = 100;
  bool grad_fault = false;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference checks of every backward pass");
  gradcheck->add_option("--seed", grad_seed);
  gradcheck->add_option("--probes", grad_probes)->check(CLI::PositiveNumber);
  gradcheck->add_flag("--inject-fault", grad_fault, "corrupt one analytic gradient");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "time bounded against dense splatting");
  bench->add_option("--gaussians", bench_args.gaussians);
  bench->add_option("--grid", bench_args.grid)->expected(3);
  bench->add_option("--voxel-size", bench_args.voxel_size);
  bench->add_option("--classes", bench_args.classes)->check(CLI::PositiveNumber);
  bench->add_option("--threads", bench_args.threads);
  bench->add_option("--cutoff", bench_args.cutoff);
  bench->add_option("--seed", bench_args.seed);
  bench->add_flag("--serial", bench_args.serial, "also time the single-threaded reference");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(synth_seed, synth_frames, synth_recipe, synth_config, synth_out);
    if (*splat) return cmd_splat(splat_args);
    if (*pipeline) return cmd_pipeline(pipe_args);
    if (*eval) return cmd_eval(eval_pred, eval_gt, eval_align, eval_out);
    if (*stcv_cmd) return cmd_stcv(stcv_dirs, stcv_align, stcv_out);
    if (*gradcheck) return cmd_gradcheck(grad_seed, grad_probes, grad_fault);
    if (*bench) return cmd_bench(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
