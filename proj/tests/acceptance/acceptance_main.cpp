// One PASS/FAIL line per acceptance criterion.
// Usage: acceptance [scratch dir] [comma-separated criterion numbers]

#include "../helpers.hpp"
#include "../oracles.hpp"

#include "gaussocc/gradcheck.hpp"
#include "gaussocc/io.hpp"
#include "gaussocc/metrics.hpp"
#include "gaussocc/spatial.hpp"
#include "gaussocc/splat.hpp"
#include "gaussocc/synth.hpp"
#include "gaussocc/temporal.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>

#ifndef GAUSSOCC_CLI
#error "GAUSSOCC_CLI must name the command-line binary"
#endif

using namespace gaussocc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

fs::path g_scratch;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

/// Runs the CLI with `args`, stdout to `out_file`; returns the exit status.
int cli(const std::string& args, const fs::path& out_file) {
  const std::string cmd = std::string("\"") + GAUSSOCC_CLI + "\" " + args + " > \"" + out_file.string() + "\" 2>> \"" +
                          (g_scratch / "cli_stderr.log").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string key, rest;
  while (in >> key && std::getline(in, rest)) {
    const auto first = rest.find_first_not_of(' ');
    out[key] = first == std::string::npos ? "" : rest.substr(first);
  }
  return out;
}

std::map<std::string, std::string> dir_snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = io::read_file(e.path());
  return out;
}

fs::path fresh(const std::string& name) {
  const fs::path p = g_scratch / name;
  fs::remove_all(p);
  return p;
}

// 1 ------------------------------------------------------------------------

Outcome splat_equivalence() {
  Outcome o;
  const GridSpec grid{{32, 32, 8}, Vec3(-8.0, -8.0, -2.0), 0.5};
  const std::size_t classes = 6;
  double worst_voxel = 0.0, worst_global = 0.0;
  std::size_t disagree = 0, voxels = 0;
  const auto start = Clock::now();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(1000 + seed);
    const GaussianSet gs = random_gaussians(grid, 200, classes, rng);
    const SplatOutput d = splat_dense(gs, grid, classes), b = splat_bounded(gs, grid, classes, 3.0);
    double grid_scale = 0.0;
    for (double v : d.logits.values) grid_scale = std::max(grid_scale, std::abs(v));
    for (std::size_t v = 0; v < grid.voxel_count(); ++v) {
      double scale = 0.0, err = 0.0;
      for (std::size_t c = 0; c < classes; ++c) {
        scale = std::max(scale, std::abs(d.logits.voxel(v)[c]));
        err = std::max(err, std::abs(b.logits.voxel(v)[c] - d.logits.voxel(v)[c]));
      }
      if (err > 0.0) worst_voxel = std::max(worst_voxel, scale > 0.0 ? err / scale : kUnboundedCutoff);
      worst_global = std::max(worst_global, err / grid_scale);
      disagree += b.labels.labels[v] != d.labels.labels[v];
      ++voxels;
    }
  }
  const double runtime = seconds_since(start);
  const double fraction = static_cast<double>(disagree) / static_cast<double>(voxels);
  o.detail << "max per-voxel relative error " << worst_voxel << " (grid-normalized " << worst_global
           << "), label disagreement " << fraction * 100.0 << "%, " << runtime << " s";
  o.require(worst_voxel <= 1e-4, "per-voxel relative error <= 1e-4");
  o.require(fraction <= 1e-3, "label disagreement <= 0.1%");
  o.require(runtime <= 60.0, "runtime <= 60 s");
  return o;
}

// 2 ------------------------------------------------------------------------

Outcome splat_invariants() {
  Outcome o;
  const GridSpec grid{{8, 8, 4}, Vec3(-2.0, -2.0, -1.0), 0.5};
  const std::size_t classes = 3;
  Rng rng(2);
  std::size_t exact_linear = 0, exact_scaling = 0;
  double general_linear = 0.0, equivariance = 0.0;
  for (int n = 0; n < 20; ++n) {
    // Linearity: a two-element union is summed in the same order as the parts.
    const GaussianSet a = testing::random_set(rng, grid, 1, classes), b = testing::random_set(rng, grid, 1, classes);
    GaussianSet u = a;
    u.insert(u.end(), b.begin(), b.end());
    const SplatOutput su = splat_dense(u, grid, classes), sa = splat_dense(a, grid, classes),
                      sb = splat_dense(b, grid, classes);
    bool same = true;
    for (std::size_t i = 0; i < su.logits.values.size(); ++i) {
      same = same && su.logits.values[i] == sa.logits.values[i] + sb.logits.values[i];
    }
    for (std::size_t v = 0; v < su.density.values.size(); ++v) {
      same = same && su.density.values[v] == sa.density.values[v] + sb.density.values[v];
    }
    exact_linear += same;

    const GaussianSet big_a = testing::random_set(rng, grid, 10, classes), big_b = testing::random_set(rng, grid, 10, classes);
    GaussianSet big_u = big_a;
    big_u.insert(big_u.end(), big_b.begin(), big_b.end());
    const SplatOutput bu = splat_dense(big_u, grid, classes), ba = splat_dense(big_a, grid, classes),
                      bb = splat_dense(big_b, grid, classes);
    for (std::size_t i = 0; i < bu.logits.values.size(); ++i) {
      general_linear = std::max(general_linear, std::abs(bu.logits.values[i] - ba.logits.values[i] - bb.logits.values[i]));
    }

    // Opacity scaling by lambda in [0, 1]; dyadic factors keep the products exact.
    const double lambda = std::ldexp(1.0, -static_cast<int>(rng.below(6)));
    GaussianSet scaled = big_u;
    for (auto& g : scaled) g.opacity *= lambda;
    const SplatOutput ss = splat_dense(scaled, grid, classes);
    bool scaled_ok = true;
    for (std::size_t i = 0; i < ss.logits.values.size(); ++i) {
      scaled_ok = scaled_ok && ss.logits.values[i] == lambda * bu.logits.values[i];
    }
    for (std::size_t v = 0; v < ss.density.values.size(); ++v) {
      scaled_ok = scaled_ok && ss.density.values[v] == lambda * bu.density.values[v];
    }
    exact_scaling += scaled_ok;

    // 90-degree turns about z map this lattice onto itself.
    const int turns = 1 + static_cast<int>(rng.below(3));
    const Quaternion q = Quaternion::from_axis_angle(Vec3::UnitZ(), turns * std::numbers::pi / 2);
    const Mat3 r = quat_to_rotation(q);
    GaussianSet rotated = big_u;
    for (auto& g : rotated) {
      g.mean = r * g.mean;
      g.rotation = q * g.rotation;
    }
    const SplatOutput sr = splat_dense(rotated, grid, classes);
    for (std::size_t v = 0; v < grid.voxel_count(); ++v) {
      const Vec3 c = voxel_center(grid, grid.unravel(v));
      const auto target = grid.locate(r * c);
      if (!target) {
        o.require(false, "rotated lattice point outside the grid");
        return o;
      }
      const std::size_t w = grid.linear(*target);
      for (std::size_t k = 0; k < classes; ++k) {
        equivariance = std::max(equivariance, std::abs(sr.logits.voxel(w)[k] - bu.logits.voxel(v)[k]));
      }
    }
  }
  o.detail << "linearity exact " << exact_linear << "/20 (20-Gaussian unions within " << general_linear
           << "), scaling exact " << exact_scaling << "/20, equivariance error " << equivariance;
  o.require(exact_linear == 20, "linearity exact");
  o.require(general_linear <= 1e-12, "20-Gaussian union within 1e-12");
  o.require(exact_scaling == 20, "opacity scaling exact");
  o.require(equivariance <= 1e-9, "equivariance <= 1e-9");
  return o;
}

// 3 ------------------------------------------------------------------------

Outcome equation_oracles() {
  Outcome o;
  Rng rng(3);
  std::map<std::string, double> worst{{"gga", 0.0}, {"vga", 0.0}, {"gsfa", 0.0}, {"align", 0.0}, {"gtff", 0.0},
                                      {"deform_attn", 0.0}};
  auto note = [&](const std::string& k, double a, double b) { worst[k] = std::max(worst[k], testing::rel_diff(a, b)); };
  for (int n = 0; n < 20; ++n) {
    const std::size_t k = 1 + rng.below(16), d = 2 + rng.below(15), m = 8, tau = 1 + rng.below(3);
    const std::size_t cams = 3, levels = 2;
    GaussianSet gs;
    for (std::size_t i = 0; i < k; ++i) gs.push_back(testing::random_gaussian(rng, Vec3(-6, -6, -1), Vec3(6, 6, 1), 3));
    const Matrix q = testing::random_matrix(rng, k, d);
    const SpatialParams sp = testing::random_spatial(rng, d, m, cams, levels);
    const TemporalParams tp = testing::random_temporal(rng, d, tau);
    const CameraRig rig = testing::feature_rig(rng, cams, levels, d);

    const OffsetSet ctx = context_offset(q, sp);
    OffsetSet g_off(k, m), v_off(k, m);
    for (std::size_t i = 0; i < k; ++i) {
      const Vector row = q.row(static_cast<Eigen::Index>(i)).transpose();
      const auto g = gga_offsets(gs[i], row, sp), v = vga_offsets(gs[i], row, sp);
      const auto c_ref = oracle::context(sp, q, static_cast<Eigen::Index>(i));
      const auto g_ref = oracle::gga(gs[i], c_ref, sp.scale_gga, oracle::gga_grid8());
      const auto v_ref = oracle::vga(gs[i], c_ref, sp.scale_vga, oracle::vga_grid8());
      for (std::size_t p = 0; p < m; ++p) {
        for (int a = 0; a < 3; ++a) {
          note("gga", g[p][a], g_ref[p][a]);
          note("vga", v[p][a], v_ref[p][a]);
        }
        g_off.at(i, p) = g[p];
        v_off.at(i, p) = v[p];
      }
    }
    const OffsetSet fused = gsfa_fuse(g_off, v_off, ctx, sp);
    for (std::size_t s = 0; s < fused.points.size(); ++s) {
      const auto ref = oracle::gsfa(oracle::v3(g_off.points[s]), oracle::v3(v_off.points[s]), oracle::v3(ctx.points[s]), sp);
      for (int a = 0; a < 3; ++a) note("gsfa", fused.points[s][a], ref[a]);
    }

    const RigidTransform key = testing::random_pose(rng), hist = testing::random_pose(rng);
    const ReferencePoints pts = gisa_reference_points(q, gs, sp);
    const ReferencePoints aligned = align_points(pts, key, hist);
    for (std::size_t s = 0; s < pts.points.size(); ++s) {
      const auto ref = oracle::align(oracle::v3(pts.points[s]), key, hist);
      for (int a = 0; a < 3; ++a) note("align", aligned.points[s][a], ref[a]);
    }

    std::vector<Matrix> stack;
    for (std::size_t t = 0; t < tau; ++t) stack.push_back(testing::random_matrix(rng, k, d));
    const Matrix fusedq = gtff(stack, tp);
    for (std::size_t i = 0; i < k; ++i) {
      const auto ref = oracle::gtff(stack, tp, static_cast<Eigen::Index>(i));
      for (std::size_t c = 0; c < d; ++c) note("gtff", fusedq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)), ref[c]);
    }

    std::vector<ProjectedPoints> proj;
    for (const auto& cam : rig) proj.push_back(warp(pts, cam));
    const Matrix attn = deform_attn(q, rig, proj, sp);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<std::vector<std::array<double, 2>>> px(cams);
      std::vector<std::vector<bool>> vis(cams);
      for (std::size_t c = 0; c < cams; ++c) {
        for (std::size_t p = 0; p < m; ++p) {
          double u = 0.0, v = 0.0;
          vis[c].push_back(oracle::project(rig[c], oracle::v3(pts.at(i, p)), u, v));
          px[c].push_back({u, v});
        }
      }
      const auto ref = oracle::deform_attn(q, static_cast<Eigen::Index>(i), rig, px, vis, sp);
      for (std::size_t c = 0; c < d; ++c) note("deform_attn", attn(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)), ref[c]);
    }
  }
  o.detail << "max relative error:";
  for (const auto& [name, err] : worst) {
    o.detail << " " << name << " " << err;
    o.require(err <= 1e-10, name + " within 1e-10");
  }
  return o;
}

// 4 ------------------------------------------------------------------------

Outcome gate_endpoints() {
  Outcome o;
  Rng rng(4);
  const double inf = std::numeric_limits<double>::infinity();
  bool vga_end = true, gga_end = true, midpoint = true, temporal_end = true;
  for (int n = 0; n < 20; ++n) {
    const std::size_t k = 1 + rng.below(16), m = 1 + rng.below(8), d = 2 + rng.below(15), tau = 1 + rng.below(3);
    SpatialParams sp = testing::random_spatial(rng, d, m, 1, 1);
    OffsetSet g(k, m), v(k, m), c(k, m);
    for (auto* set : {&g, &v, &c}) {
      for (auto& p : set->points) p = Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
    }
    vga_end = vga_end && gsfa_fuse(g, v, c, sp, -inf).points == v.points;
    gga_end = gga_end && gsfa_fuse(g, v, c, sp, inf).points == g.points;
    for (auto* l : {&sp.gate_gga, &sp.gate_vga, &sp.gate_ctx, &sp.gate_out}) l->set_zero();
    const OffsetSet mid = gsfa_fuse(g, v, c, sp);
    for (std::size_t s = 0; s < mid.points.size(); ++s) midpoint = midpoint && mid.points[s] == 0.5 * (g.points[s] + v.points[s]);

    const TemporalParams tp = testing::random_temporal(rng, d, tau);
    std::vector<Matrix> stack;
    for (std::size_t t = 0; t < tau; ++t) stack.push_back(testing::random_matrix(rng, k, d));
    const Matrix gate = temporal_gate(stack, tp, -inf);
    temporal_end = temporal_end && (gate.array() == 0.0).all() && temporal_modulate(stack.back(), gate) == stack.back();
  }
  o.detail << "lambda_S=0 gives VGA " << vga_end << ", lambda_S=1 gives GGA " << gga_end << ", zero gate midpoint "
           << midpoint << ", lambda_T=0 keeps the keyframe " << temporal_end;
  o.require(vga_end && gga_end, "spatial gate endpoints");
  o.require(midpoint, "zero gate midpoint");
  o.require(temporal_end, "temporal gate endpoint");
  return o;
}

// 5 ------------------------------------------------------------------------

Outcome gradient_checks() {
  Outcome o;
  nn::GradcheckOptions opts;
  opts.probes = 100;
  const auto reports = nn::run_gradcheck_suite(opts);
  double worst = 0.0;
  for (const auto& r : reports) {
    worst = std::max(worst, r.max_rel_error);
    o.require(r.passed() && r.probes == 100, r.name);
  }
  o.require(reports.size() == 7, "seven primitives");
  const int ok = cli("gradcheck", g_scratch / "gradcheck.txt");
  const int faulty = cli("gradcheck --probes 5 --inject-fault", g_scratch / "gradcheck_fault.txt");
  o.detail << reports.size() << " primitives, max relative error " << worst << ", gradcheck exit " << ok
           << ", with injected fault exit " << faulty;
  o.require(ok == 0, "gradcheck exits 0");
  o.require(faulty == 1, "injected fault exits 1");
  return o;
}

// 6 ------------------------------------------------------------------------

Outcome metrics_oracles() {
  Outcome o;
  Rng rng(6);
  GridSpec spec;
  spec.dims = {8, 8, 4};
  std::size_t mismatches = 0;
  for (int n = 0; n < 50; ++n) {
    const std::size_t classes = 2 + rng.below(5);
    const LabelGrid p = testing::random_labels(rng, spec, classes, rng.uniform(0.1, 0.9));
    const LabelGrid g = testing::random_labels(rng, spec, classes, rng.uniform(0.1, 0.9));
    const ConfusionCounts c = confusion(p, g);
    mismatches += sc_iou(c) != oracle::sc_iou(p, g);
    for (std::size_t k = 0; k < classes; ++k) {
      const double ref = oracle::class_iou(p, g, static_cast<int>(k));
      const auto iou = class_iou(c.classes[k]);
      mismatches += iou.has_value() != (ref >= 0.0) || (iou && *iou != ref);
    }
    mismatches += mean_iou(c) != oracle::mean_iou(p, g);
    const std::vector<LabelGrid> seq{p, g, testing::random_labels(rng, spec, classes, rng.uniform(0.1, 0.9))};
    mismatches += stcv(seq).value != oracle::stcv(seq);
  }
  GridSpec line;
  line.dims = {12, 1, 1};
  LabelGrid pred(line, 2), gt(line, 2);
  for (std::size_t v : {0, 1, 2, 3}) pred.labels[v] = 1;
  for (std::size_t v : {1, 2, 3, 4, 5}) gt.labels[v] = 1;
  const double fixture_iou = sc_iou(confusion(pred, gt));
  std::vector<LabelGrid> frames(2, LabelGrid(line, 3));
  for (std::size_t v = 0; v < 10; ++v) frames[0].labels[v] = frames[1].labels[v] = 0;
  frames[1].labels[2] = 1;
  frames[1].labels[8] = 2;
  const double fixture_stcv = stcv(frames).value;
  o.detail << mismatches << " oracle mismatches over 50 pairs and sequences, fixtures SC IoU " << fixture_iou
           << " STCV " << fixture_stcv;
  o.require(mismatches == 0, "exact oracle agreement");
  o.require(fixture_iou == 0.5 && fixture_stcv == 0.2, "hand fixtures");
  return o;
}

// 7 ------------------------------------------------------------------------

Outcome temporal_direction() {
  Outcome o;
  SceneConfig cfg;
  cfg.gaussians = 64;
  std::string stable_args = "stcv --align", jitter_args = "stcv --align";
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const SyntheticScene scene = make_scene(cfg, 70 + seed, 5, Recipe::Urban);
    const fs::path sdir = fresh("stable_" + std::to_string(seed)), jdir = fresh("jitter_" + std::to_string(seed));
    fs::create_directories(sdir);
    fs::create_directories(jdir);
    std::vector<io::PoseRecord> poses;
    for (std::size_t f = 0; f < scene.frame_count(); ++f) {
      poses.push_back({scene.timestamps[f], Quaternion::from_rotation(scene.poses[f].rotation()), scene.poses[f].translation()});
    }
    Rng rng(700 + seed);
    for (std::size_t f = 0; f < scene.frame_count(); ++f) {
      const LabelGrid& gt = scene.ground_truth[f];
      LabelGrid jittered = gt;
      for (auto& l : jittered.labels) {
        if (l != kEmptyLabel && rng.uniform() < 0.05) l = static_cast<std::uint8_t>((l + 1 + rng.below(cfg.classes - 1)) % cfg.classes);
      }
      io::write_voxel_grid(sdir / frame_file_name("pred", f, ".occ"), gt);
      io::write_voxel_grid(jdir / frame_file_name("pred", f, ".occ"), jittered);
    }
    // Written from the records so both directories share the exact poses the CLI will read.
    io::write_file(sdir / "poses.txt", io::format_pose_log(poses));
    io::write_file(jdir / "poses.txt", io::format_pose_log(poses));
    stable_args += " --pred \"" + sdir.string() + "\"";
    jitter_args += " --pred \"" + jdir.string() + "\"";
  }
  const int a = cli(stable_args, g_scratch / "stcv_stable.txt"), b = cli(jitter_args, g_scratch / "stcv_jitter.txt");
  o.require(a == 0 && b == 0, "stcv exits 0");
  if (!o.pass) return o;
  const double stable = std::stod(key_values(io::read_file(g_scratch / "stcv_stable.txt"))["mean"]);
  const double jitter = std::stod(key_values(io::read_file(g_scratch / "stcv_jitter.txt"))["mean"]);
  o.detail << "mSTCV stable " << stable << ", jittered " << jitter << " over 4 urban scenes";
  o.require(jitter > stable, "jittered mSTCV strictly higher");
  return o;
}

// 8 ------------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const fs::path scene = fresh("det_scene");
  o.require(cli("synth --seed 8 --frames 3 --recipe urban --out \"" + scene.string() + "\"", g_scratch / "det_synth.txt") == 0,
            "synth");
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* threads : {"1", "1", "4"}) {
    const fs::path out = fresh("det_run_" + std::to_string(runs.size()));
    o.require(cli("pipeline --scene \"" + scene.string() + "\" --seed 5 --threads " + threads + " --out \"" + out.string() + "\"",
                  g_scratch / "det_pipeline.txt") == 0,
              "pipeline");
    if (!o.pass) return o;
    runs.push_back(dir_snapshot(out));
  }
  o.detail << runs[0].size() << " output files; repeat run identical " << (runs[0] == runs[1]) << ", 1 vs 4 threads identical "
           << (runs[0] == runs[2]);
  o.require(runs[0].count("pred_0002.occ") == 1, "prediction grids written");
  o.require(runs[0] == runs[1], "two runs byte-identical");
  o.require(runs[0] == runs[2], "threads 1 and 4 byte-identical");
  return o;
}

// 9 ------------------------------------------------------------------------

Outcome end_to_end() {
  Outcome o;
  const fs::path scene = fresh("e2e_scene"), out = fresh("e2e_pred");
  const SceneConfig cfg;  // desk defaults: coupled, tau 3, K 512, 64x64x8
  o.require(cfg.fusion_mode == FusionMode::Coupled && cfg.frames == 3 && cfg.gaussians == 512 &&
                cfg.dims == std::array<std::size_t, 3>{64, 64, 8},
            "desk defaults");
  const auto start = Clock::now();
  o.require(cli("synth --seed 9 --frames 4 --recipe urban --out \"" + scene.string() + "\"", g_scratch / "e2e_synth.txt") == 0, "synth");
  o.require(cli("pipeline --scene \"" + scene.string() + "\" --mode coupled --frames 3 --threads 1 --out \"" + out.string() + "\"",
                g_scratch / "e2e_pipeline.txt") == 0,
            "pipeline");
  o.require(cli("eval --pred \"" + out.string() + "\" --gt \"" + scene.string() + "\" --align", g_scratch / "e2e_eval.txt") == 0,
            "eval");
  const double runtime = seconds_since(start);
  if (!o.pass) return o;
  std::size_t checked = 0, violations = 0;
  std::string first_violation;
  for (std::size_t f = 0; f < 4; ++f) {
    const fs::path p = out / frame_file_name("gaussians", f, ".txt");
    for (const auto& g : io::parse_gaussians(io::read_file(p), p.string())) {
      std::string why;
      ++checked;
      if (!satisfies_invariants(g, cfg, &why)) {
        ++violations;
        if (first_violation.empty()) first_violation = why;
      }
    }
  }
  const auto report = key_values(io::read_file(g_scratch / "e2e_eval.txt"));
  o.detail << runtime << " s, " << checked << " Gaussians checked, " << violations << " violations, sc_iou "
           << report.at("sc_iou") << ", miou " << report.at("miou");
  o.require(runtime <= 120.0, "runtime <= 120 s");
  o.require(checked == 4 * cfg.gaussians, "every Gaussian dumped");
  o.require(violations == 0, "invariants: " + first_violation);
  return o;
}

// 10 -----------------------------------------------------------------------

Outcome performance() {
  Outcome o;
  const int status = cli("bench", g_scratch / "bench.txt");
  const auto kv = key_values(io::read_file(g_scratch / "bench.txt"));
  o.require(status == 0, "bench exits 0");
  o.require(kv.count("equality") && kv.at("equality") == "pass", "equality pass");
  if (kv.count("speedup")) {
    o.detail << "K " << kv.at("gaussians") << ", grid " << kv.at("grid") << ", dense " << kv.at("dense_seconds")
             << " s, bounded " << kv.at("bounded_seconds") << " s, speedup " << kv.at("speedup")
             << "x, label disagreement " << kv.at("label_disagreement");
  }
  o.require(kv.count("gaussians") && kv.at("gaussians") == "25600" && kv.at("grid") == "200 200 16", "full scale");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  g_scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "gaussocc_acceptance";
  fs::create_directories(g_scratch);
  fs::remove(g_scratch / "cli_stderr.log");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"splatting oracle equivalence", splat_equivalence},
      {"splatting invariants", splat_invariants},
      {"equation-level oracles", equation_oracles},
      {"gate endpoints", gate_endpoints},
      {"gradient checks", gradient_checks},
      {"metrics", metrics_oracles},
      {"temporal-consistency direction", temporal_direction},
      {"determinism", determinism},
      {"end-to-end shape/invariant run", end_to_end},
      {"performance", performance},
  };
  std::vector<bool> selected(criteria.size(), argc <= 2);
  if (argc > 2) {
    std::istringstream list(argv[2]);
    for (std::string item; std::getline(list, item, ',');) {
      const std::size_t n = std::stoul(item);
      if (n >= 1 && n <= criteria.size()) selected[n - 1] = true;
    }
  }
  int failed = 0, run = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    ++run;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ": " << criteria[i].first << ": " << o.detail.str()
              << std::endl;
  }
  std::cout << run - failed << "/" << run << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
