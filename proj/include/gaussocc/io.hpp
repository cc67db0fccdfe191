#pragma once

#include "gaussocc/camera.hpp"
#include "gaussocc/geometry.hpp"
#include "gaussocc/grid.hpp"
#include "gaussocc/metrics.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaussocc::io {

// Voxel grid file ("OCCV1"), little-endian:
//   magic[5] | X Y Z : u32 | voxel_size : f64 | origin : 3 x f64 |
//   classes : u32 | labels : X*Y*Z x u8, x fastest, 255 = empty
inline constexpr std::string_view kVoxelMagic = "OCCV1";

std::string encode_voxel_grid(const LabelGrid& grid);
/// Throws ParseError on a bad magic, truncated payload or invalid label.
LabelGrid decode_voxel_grid(std::string_view bytes, const std::string& source = "grid");

void write_voxel_grid(const std::filesystem::path& path, const LabelGrid& grid);
LabelGrid read_voxel_grid(const std::filesystem::path& path);

/// One Gaussian per line: mx my mz sx sy sz qw qx qy qz alpha c_0 .. c_{C-1},
/// preceded by a "# gaussians classes=C" header.
std::string format_gaussians(const GaussianSet& gaussians, std::size_t num_classes);
/// `num_classes` 0 means take it from the header or the first record.
/// Throws ParseError with the line number.
GaussianSet parse_gaussians(std::string_view text, const std::string& source = "gaussians",
                            std::size_t num_classes = 0);

/// Class count from the header line, 0 when there is none.
std::size_t gaussian_header_classes(std::string_view text);

struct PoseRecord {
  double timestamp = 0.0;
  Quaternion rotation;
  Vec3 translation = Vec3::Zero();

  RigidTransform transform() const { return {rotation, translation}; }
};

/// One frame per line: index timestamp qw qx qy qz tx ty tz.
std::string format_pose_log(const std::vector<PoseRecord>& poses);
std::vector<PoseRecord> parse_pose_log(std::string_view text, const std::string& source = "poses");

/// One camera per line: fx fy cx cy width height, the row-major 3x3
/// extrinsic rotation, the translation, then the pyramid ratios. Feature
/// data is stored separately.
std::string format_rig(const CameraRig& rig);
CameraRig parse_rig(std::string_view text, const std::string& source = "rig");

// Feature pyramid file ("FEAT1"): levels : u32, then per level
// width height channels ratio : u32 and width*height*channels x f32.
std::string encode_feature_pyramid(const std::vector<FeaturePlane>& pyramid);
std::vector<FeaturePlane> decode_feature_pyramid(std::string_view bytes, const std::string& source = "features");

/// Key-value lines followed by a per-class table:
///   frames, sc_iou, miou, [stcv, stcv_flagged_pairs], then
///   "class name tp fp fn iou" rows; iou is "-" for an absent class.
/// Values use %.17g so the report is byte-stable.
std::string format_metrics_report(const ConfusionCounts& counts, std::size_t frames,
                                  const std::optional<StcvResult>& temporal = std::nullopt,
                                  std::span<const std::string> class_names = {});

/// "scene i value" rows, then mean, min, max and flagged_pairs.
std::string format_stcv_report(const StcvReport& report);

std::string read_file(const std::filesystem::path& path);
/// Throws std::runtime_error when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace gaussocc::io
