#include "gaussocc/config.hpp"

#include "gaussocc/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace gaussocc {

std::string_view to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::Loose: return "loose";
    case FusionMode::Tight: return "tight";
    case FusionMode::Coupled: return "coupled";
  }
  return "coupled";
}

FusionMode parse_fusion_mode(std::string_view text) {
  if (text == "loose") return FusionMode::Loose;
  if (text == "tight") return FusionMode::Tight;
  if (text == "coupled") return FusionMode::Coupled;
  throw ConfigError("unknown fusion mode '" + std::string(text) + "' (loose|tight|coupled)");
}

SceneConfig SceneConfig::full_scale() {
  SceneConfig cfg;
  cfg.range_min = Vec3(-50.0, -50.0, -5.0);
  cfg.range_max = Vec3(50.0, 50.0, 3.0);
  cfg.dims = {200, 200, 16};
  cfg.voxel_size = 0.5;
  cfg.gaussians = 25600;
  cfg.embed_dim = 128;
  cfg.blocks = 4;
  cfg.levels = 4;
  cfg.classes = 16;
  return cfg;
}

void SceneConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(dims[0] > 0 && dims[1] > 0 && dims[2] > 0, "dims must be positive");
  require(voxel_size > 0.0 && std::isfinite(voxel_size), "voxel_size must be positive");
  for (int a = 0; a < 3; ++a) {
    const double extent = range_max[a] - range_min[a];
    const double grid_extent = static_cast<double>(dims[a]) * voxel_size;
    require(std::abs(extent - grid_extent) <= 1e-9 * std::max(1.0, std::abs(extent)),
            "dims * voxel_size must equal the perception range extent on every axis");
  }
  require(gaussians >= 1, "gaussians must be >= 1");
  require(embed_dim >= 2, "embed_dim must be >= 2");
  require(blocks >= 1, "blocks must be >= 1");
  require(samples >= 1, "samples must be >= 1");
  require(classes >= 1 && classes < kEmptyLabel, "classes must be in [1, 255)");
  require(frames >= 1, "frames must be >= 1");
  require(cameras >= 1, "cameras must be >= 1");
  require(levels >= 1, "levels must be >= 1");
  require(image_width >= 1 && image_height >= 1, "image size must be positive");
  require(occupancy_threshold >= 0.0, "occupancy_threshold must be >= 0");
  require(cutoff_sigma > 0.0, "cutoff_sigma must be > 0");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& w) {
  std::size_t used = 0;
  const double v = std::stod(w, &used);
  if (used != w.size()) throw std::invalid_argument("trailing characters");
  return v;
}

std::uint64_t to_uint(const std::string& w) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc() || p != w.data() + w.size()) throw std::invalid_argument("not an unsigned integer");
  return v;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SceneConfig parse_config(std::string_view text, const std::string& source) {
  SceneConfig cfg;
  using Setter = std::function<void(const std::vector<std::string>&)>;
  auto scalar = [](auto& field) -> Setter {
    return [&field](const std::vector<std::string>& v) {
      if (v.size() != 1) throw std::invalid_argument("expected one value");
      using T = std::decay_t<decltype(field)>;
      if constexpr (std::is_floating_point_v<T>) {
        field = to_double(v[0]);
      } else {
        field = static_cast<T>(to_uint(v[0]));
      }
    };
  };
  auto vec3 = [](Vec3& field) -> Setter {
    return [&field](const std::vector<std::string>& v) {
      if (v.size() != 3) throw std::invalid_argument("expected three values");
      for (int a = 0; a < 3; ++a) field[a] = to_double(v[a]);
    };
  };
  const std::map<std::string, Setter> setters = {
      {"range_min", vec3(cfg.range_min)},
      {"range_max", vec3(cfg.range_max)},
      {"dims",
       [&cfg](const std::vector<std::string>& v) {
         if (v.size() != 3) throw std::invalid_argument("expected three values");
         for (int a = 0; a < 3; ++a) cfg.dims[a] = to_uint(v[a]);
       }},
      {"voxel_size", scalar(cfg.voxel_size)},
      {"gaussians", scalar(cfg.gaussians)},
      {"embed_dim", scalar(cfg.embed_dim)},
      {"blocks", scalar(cfg.blocks)},
      {"samples", scalar(cfg.samples)},
      {"classes", scalar(cfg.classes)},
      {"fusion_mode",
       [&cfg](const std::vector<std::string>& v) {
         if (v.size() != 1) throw std::invalid_argument("expected one value");
         cfg.fusion_mode = parse_fusion_mode(v[0]);
       }},
      {"frames", scalar(cfg.frames)},
      {"seed", scalar(cfg.seed)},
      {"cameras", scalar(cfg.cameras)},
      {"levels", scalar(cfg.levels)},
      {"image_width", scalar(cfg.image_width)},
      {"image_height", scalar(cfg.image_height)},
      {"occupancy_threshold", scalar(cfg.occupancy_threshold)},
      {"cutoff_sigma", scalar(cfg.cutoff_sigma)},
  };

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError(source, line_no, "unknown key '" + key + "'");
    try {
      it->second(words(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw ParseError(source, line_no, "bad value for '" + key + "': " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ParseError(source, 0, e.what());
  }
  return cfg;
}

std::string format_config(const SceneConfig& cfg) {
  std::ostringstream out;
  auto v3 = [](const Vec3& v) {
    return fmt_double(v.x()) + " " + fmt_double(v.y()) + " " + fmt_double(v.z());
  };
  out << "range_min = " << v3(cfg.range_min) << "\n";
  out << "range_max = " << v3(cfg.range_max) << "\n";
  out << "dims = " << cfg.dims[0] << " " << cfg.dims[1] << " " << cfg.dims[2] << "\n";
  out << "voxel_size = " << fmt_double(cfg.voxel_size) << "\n";
  out << "gaussians = " << cfg.gaussians << "\n";
  out << "embed_dim = " << cfg.embed_dim << "\n";
  out << "blocks = " << cfg.blocks << "\n";
  out << "samples = " << cfg.samples << "\n";
  out << "classes = " << cfg.classes << "\n";
  out << "fusion_mode = " << to_string(cfg.fusion_mode) << "\n";
  out << "frames = " << cfg.frames << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "cameras = " << cfg.cameras << "\n";
  out << "levels = " << cfg.levels << "\n";
  out << "image_width = " << cfg.image_width << "\n";
  out << "image_height = " << cfg.image_height << "\n";
  out << "occupancy_threshold = " << fmt_double(cfg.occupancy_threshold) << "\n";
  out << "cutoff_sigma = " << fmt_double(cfg.cutoff_sigma) << "\n";
  return out.str();
}

}  // namespace gaussocc
