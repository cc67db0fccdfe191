#pragma once

#include "gaussocc/grid.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace gaussocc {

/// Where gated temporal fusion runs: after the last block (loose), inside
/// every block (tight), or both (coupled).
enum class FusionMode { Loose, Tight, Coupled };

std::string_view to_string(FusionMode mode);
FusionMode parse_fusion_mode(std::string_view text);

inline bool fuses_inside_blocks(FusionMode m) { return m != FusionMode::Loose; }
inline bool fuses_after_blocks(FusionMode m) { return m != FusionMode::Tight; }

struct SceneConfig {
  Vec3 range_min{-16.0, -16.0, -3.0};
  Vec3 range_max{16.0, 16.0, 1.0};
  std::array<std::size_t, 3> dims{64, 64, 8};
  double voxel_size = 0.5;

  std::size_t gaussians = 512;   ///< K
  std::size_t embed_dim = 32;    ///< D
  std::size_t blocks = 4;        ///< n
  std::size_t samples = 8;       ///< M, per offset branch
  std::size_t classes = 6;       ///< |C|, excluding empty
  FusionMode fusion_mode = FusionMode::Coupled;
  std::size_t frames = 3;        ///< tau, temporal window
  std::uint64_t seed = 1;

  std::size_t cameras = 6;
  std::size_t levels = 2;
  std::size_t image_width = 96;
  std::size_t image_height = 64;

  double occupancy_threshold = 0.05;  ///< tau_occ
  double cutoff_sigma = 3.0;

  /// Full-size settings: 200x200x16 grid of 0.5 m voxels over
  /// [-50,50]^2 x [-5,3], K = 25600, D = 128, 4 blocks, 4 pyramid levels.
  static SceneConfig full_scale();

  GridSpec grid() const { return {dims, range_min, voxel_size}; }

  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const SceneConfig&) const = default;
};

/// Flat `key = value` document; unknown keys and malformed values throw
/// ParseError with the line number.
SceneConfig parse_config(std::string_view text, const std::string& source = "config");
std::string format_config(const SceneConfig& cfg);

}  // namespace gaussocc
