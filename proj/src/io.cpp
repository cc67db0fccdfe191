#include "gaussocc/io.hpp"

#include "gaussocc/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gaussocc::io {
namespace {

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  Reader(std::string_view bytes, const std::string& source) : bytes_(bytes), source_(source) {}

  template <typename T>
  T get(const char* what) {
    if (bytes_.size() - pos_ < sizeof(T)) throw ParseError(source_, 0, std::string("truncated ") + what);
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::string_view take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) throw ParseError(source_, 0, std::string("truncated ") + what);
    const auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) throw ParseError(source_, 0, "trailing bytes after payload");
  }

 private:
  std::string_view bytes_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw ShapeError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view tok, const std::string& source, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(source, line, "expected a finite number, got '" + std::string(tok) + "'");
  }
  return v;
}

std::size_t parse_size(std::string_view tok, const std::string& source, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(source, line, "expected a non-negative integer, got '" + std::string(tok) + "'");
  }
  return v;
}

/// Calls fn(line_number, tokens) for every non-blank, non-comment line.
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (!tokens.empty()) fn(line_no, tokens);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

Quaternion parse_quaternion(std::span<const std::string_view> t, const std::string& source, std::size_t line) {
  try {
    return Quaternion(parse_double(t[0], source, line), parse_double(t[1], source, line),
                      parse_double(t[2], source, line), parse_double(t[3], source, line));
  } catch (const DegenerateInput& e) {
    throw ParseError(source, line, e.what());
  }
}

void append_quaternion(std::string& out, const Quaternion& q) {
  out += fmt(q.w()) + ' ' + fmt(q.x()) + ' ' + fmt(q.y()) + ' ' + fmt(q.z());
}

void append_vec(std::string& out, const Vec3& v) {
  out += fmt(v.x()) + ' ' + fmt(v.y()) + ' ' + fmt(v.z());
}

}  // namespace

std::string encode_voxel_grid(const LabelGrid& grid) {
  grid.validate();
  if (grid.num_classes > 255) throw ShapeError("voxel files hold at most 255 classes");
  std::string out(kVoxelMagic);
  for (const auto d : grid.spec.dims) put(out, checked_u32(d, "grid dimension"));
  put(out, grid.spec.voxel_size);
  for (int a = 0; a < 3; ++a) put(out, grid.spec.origin[a]);
  put(out, checked_u32(grid.num_classes, "class count"));
  out.append(reinterpret_cast<const char*>(grid.labels.data()), grid.labels.size());
  return out;
}

LabelGrid decode_voxel_grid(std::string_view bytes, const std::string& source) {
  Reader r(bytes, source);
  if (r.take(kVoxelMagic.size(), "magic") != kVoxelMagic) throw ParseError(source, 0, "not an OCCV1 voxel file");
  GridSpec spec;
  for (auto& d : spec.dims) d = r.get<std::uint32_t>("header");
  spec.voxel_size = r.get<double>("header");
  for (int a = 0; a < 3; ++a) spec.origin[a] = r.get<double>("header");
  const std::uint32_t classes = r.get<std::uint32_t>("header");
  try {
    spec.validate();
  } catch (const ShapeError& e) {
    throw ParseError(source, 0, e.what());
  }
  if (classes > 255) throw ParseError(source, 0, "class count exceeds 255");
  LabelGrid grid(spec, classes);
  const auto payload = r.take(spec.voxel_count(), "label payload");
  std::memcpy(grid.labels.data(), payload.data(), payload.size());
  r.expect_end();
  for (std::size_t v = 0; v < grid.labels.size(); ++v) {
    if (grid.labels[v] != kEmptyLabel && grid.labels[v] >= classes) {
      throw ParseError(source, 0, "label " + std::to_string(grid.labels[v]) + " at voxel " + std::to_string(v) +
                                      " exceeds class count " + std::to_string(classes));
    }
  }
  return grid;
}

void write_voxel_grid(const std::filesystem::path& path, const LabelGrid& grid) {
  write_file(path, encode_voxel_grid(grid));
}

LabelGrid read_voxel_grid(const std::filesystem::path& path) {
  return decode_voxel_grid(read_file(path), path.string());
}

std::string format_gaussians(const GaussianSet& gaussians, std::size_t num_classes) {
  std::string out = "# gaussians classes=" + std::to_string(num_classes) + "\n";
  for (const auto& g : gaussians) {
    if (static_cast<std::size_t>(g.logits.size()) != num_classes) {
      throw ShapeError("Gaussian logit count does not match the class count");
    }
    append_vec(out, g.mean);
    out += ' ';
    append_vec(out, g.scale);
    out += ' ';
    append_quaternion(out, g.rotation);
    out += ' ' + fmt(g.opacity);
    for (Eigen::Index c = 0; c < g.logits.size(); ++c) out += ' ' + fmt(g.logits[c]);
    out += '\n';
  }
  return out;
}

std::size_t gaussian_header_classes(std::string_view text) {
  constexpr std::string_view kHeader = "# gaussians classes=";
  if (text.substr(0, kHeader.size()) != kHeader) return 0;
  const auto eol = text.find('\n');
  const auto value = text.substr(kHeader.size(), (eol == std::string_view::npos ? text.size() : eol) - kHeader.size());
  const auto tokens = split_ws(value);
  if (tokens.size() != 1) throw ParseError("gaussians", 1, "malformed header");
  return parse_size(tokens[0], "gaussians", 1);
}

GaussianSet parse_gaussians(std::string_view text, const std::string& source, std::size_t num_classes) {
  if (num_classes == 0) num_classes = gaussian_header_classes(text);
  GaussianSet out;
  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& t) {
    if (num_classes == 0) {
      if (t.size() <= 11) throw ParseError(source, line, "record needs at least one logit");
      num_classes = t.size() - 11;
    }
    if (t.size() != 11 + num_classes) {
      throw ParseError(source, line,
                       "expected " + std::to_string(11 + num_classes) + " fields, got " + std::to_string(t.size()));
    }
    GaussianPrimitive g;
    for (int a = 0; a < 3; ++a) g.mean[a] = parse_double(t[a], source, line);
    for (int a = 0; a < 3; ++a) {
      g.scale[a] = parse_double(t[3 + a], source, line);
      if (!(g.scale[a] > 0.0)) throw ParseError(source, line, "scale must be positive");
    }
    g.rotation = parse_quaternion(std::span(t).subspan(6, 4), source, line);
    g.opacity = parse_double(t[10], source, line);
    if (g.opacity < 0.0 || g.opacity > 1.0) throw ParseError(source, line, "opacity must lie in [0, 1]");
    g.logits.resize(static_cast<Eigen::Index>(num_classes));
    for (std::size_t c = 0; c < num_classes; ++c) {
      g.logits[static_cast<Eigen::Index>(c)] = parse_double(t[11 + c], source, line);
    }
    out.push_back(std::move(g));
  });
  return out;
}

std::string format_pose_log(const std::vector<PoseRecord>& poses) {
  std::string out = "# index timestamp qw qx qy qz tx ty tz\n";
  for (std::size_t i = 0; i < poses.size(); ++i) {
    out += std::to_string(i) + ' ' + fmt(poses[i].timestamp) + ' ';
    append_quaternion(out, poses[i].rotation);
    out += ' ';
    append_vec(out, poses[i].translation);
    out += '\n';
  }
  return out;
}

std::vector<PoseRecord> parse_pose_log(std::string_view text, const std::string& source) {
  std::vector<PoseRecord> out;
  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& t) {
    if (t.size() != 9) throw ParseError(source, line, "expected 9 fields, got " + std::to_string(t.size()));
    if (parse_size(t[0], source, line) != out.size()) throw ParseError(source, line, "frame indices must be consecutive");
    PoseRecord p;
    p.timestamp = parse_double(t[1], source, line);
    p.rotation = parse_quaternion(std::span(t).subspan(2, 4), source, line);
    for (int a = 0; a < 3; ++a) p.translation[a] = parse_double(t[6 + a], source, line);
    out.push_back(p);
  });
  return out;
}

std::string format_rig(const CameraRig& rig) {
  std::string out = "# fx fy cx cy width height r00 r01 r02 r10 r11 r12 r20 r21 r22 tx ty tz ratios...\n";
  for (const auto& cam : rig) {
    const auto& k = cam.intrinsics;
    out += fmt(k.fx) + ' ' + fmt(k.fy) + ' ' + fmt(k.cx) + ' ' + fmt(k.cy) + ' ' + std::to_string(cam.width) + ' ' +
           std::to_string(cam.height);
    const Mat3& r = cam.extrinsics.rotation();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) out += ' ' + fmt(r(a, b));
    }
    out += ' ';
    append_vec(out, cam.extrinsics.translation());
    for (const auto& level : cam.pyramid) out += ' ' + std::to_string(level.ratio);
    out += '\n';
  }
  return out;
}

CameraRig parse_rig(std::string_view text, const std::string& source) {
  CameraRig rig;
  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& t) {
    if (t.size() < 18) throw ParseError(source, line, "expected at least 18 fields, got " + std::to_string(t.size()));
    Camera cam;
    cam.intrinsics = {parse_double(t[0], source, line), parse_double(t[1], source, line),
                      parse_double(t[2], source, line), parse_double(t[3], source, line)};
    cam.width = parse_size(t[4], source, line);
    cam.height = parse_size(t[5], source, line);
    Mat3 r;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) r(a, b) = parse_double(t[static_cast<std::size_t>(6 + 3 * a + b)], source, line);
    }
    const Vec3 tr(parse_double(t[15], source, line), parse_double(t[16], source, line),
                  parse_double(t[17], source, line));
    try {
      cam.extrinsics = RigidTransform(r, tr);
    } catch (const DegenerateInput& e) {
      throw ParseError(source, line, e.what());
    }
    for (std::size_t i = 18; i < t.size(); ++i) {
      const std::size_t ratio = parse_size(t[i], source, line);
      if (ratio == 0) throw ParseError(source, line, "pyramid ratio must be positive");
      FeaturePlane level;
      level.ratio = ratio;
      cam.pyramid.push_back(std::move(level));
    }
    if (!(cam.intrinsics.fx > 0.0) || !(cam.intrinsics.fy > 0.0) || cam.width == 0 || cam.height == 0) {
      throw ParseError(source, line, "camera needs positive focal lengths and image size");
    }
    rig.push_back(std::move(cam));
  });
  return rig;
}

std::string encode_feature_pyramid(const std::vector<FeaturePlane>& pyramid) {
  std::string out = "FEAT1";
  put(out, checked_u32(pyramid.size(), "level count"));
  for (const auto& p : pyramid) {
    if (p.data.size() != p.width * p.height * p.channels) throw ShapeError("feature level payload size mismatch");
    put(out, checked_u32(p.width, "width"));
    put(out, checked_u32(p.height, "height"));
    put(out, checked_u32(p.channels, "channels"));
    put(out, checked_u32(p.ratio, "ratio"));
    for (const double v : p.data) put(out, static_cast<float>(v));
  }
  return out;
}

std::vector<FeaturePlane> decode_feature_pyramid(std::string_view bytes, const std::string& source) {
  Reader r(bytes, source);
  if (r.take(5, "magic") != "FEAT1") throw ParseError(source, 0, "not a FEAT1 feature file");
  const std::uint32_t levels = r.get<std::uint32_t>("header");
  std::vector<FeaturePlane> out;
  for (std::uint32_t l = 0; l < levels; ++l) {
    const std::size_t w = r.get<std::uint32_t>("level header");
    const std::size_t h = r.get<std::uint32_t>("level header");
    const std::size_t c = r.get<std::uint32_t>("level header");
    const std::size_t ratio = r.get<std::uint32_t>("level header");
    if (ratio == 0) throw ParseError(source, 0, "pyramid ratio must be positive");
    if (w * h * c * sizeof(float) > bytes.size()) throw ParseError(source, 0, "truncated level payload");
    FeaturePlane p(w, h, c, ratio);
    for (auto& v : p.data) v = static_cast<double>(r.get<float>("level payload"));
    out.push_back(std::move(p));
  }
  r.expect_end();
  return out;
}

std::string format_metrics_report(const ConfusionCounts& counts, std::size_t frames,
                                  const std::optional<StcvResult>& temporal,
                                  std::span<const std::string> class_names) {
  std::string out = "frames " + std::to_string(frames) + "\n";
  out += "sc_iou " + fmt(sc_iou(counts)) + "\n";
  bool any_present = false;
  for (const auto& c : counts.classes) any_present = any_present || class_iou(c).has_value();
  out += "miou " + (any_present ? fmt(mean_iou(counts)) : std::string("-")) + "\n";
  if (temporal) {
    out += "stcv " + fmt(temporal->value) + "\n";
    out += "stcv_flagged_pairs " + std::to_string(temporal->flagged_pairs) + "\n";
  }
  out += "class name tp fp fn iou\n";
  for (std::size_t c = 0; c < counts.classes.size(); ++c) {
    const auto& k = counts.classes[c];
    const auto iou = class_iou(k);
    const std::string name = c < class_names.size() ? class_names[c] : "class" + std::to_string(c);
    out += std::to_string(c) + ' ' + name + ' ' + std::to_string(k.tp) + ' ' + std::to_string(k.fp) + ' ' +
           std::to_string(k.fn) + ' ' + (iou ? fmt(*iou) : std::string("-")) + "\n";
  }
  return out;
}

std::string format_stcv_report(const StcvReport& report) {
  std::string out;
  for (std::size_t i = 0; i < report.per_scene.size(); ++i) {
    out += "scene " + std::to_string(i) + ' ' + fmt(report.per_scene[i]) + "\n";
  }
  out += "mean " + fmt(report.mean) + "\nmin " + fmt(report.min) + "\nmax " + fmt(report.max) + "\n";
  out += "flagged_pairs " + std::to_string(report.flagged_pairs) + "\n";
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace gaussocc::io
