#include "gaussocc/splat.hpp"

#include "splat_kernel.hpp"

namespace gaussocc::reference {

SplatOutput splat_serial(const GaussianSet& gaussians, const GridSpec& grid, std::size_t num_classes,
                         double occupancy_threshold) {
  grid.validate();
  SplatOutput out;
  out.logits = LogitGrid(grid, num_classes);
  out.density = ScalarGrid(grid);
  const auto prepared = detail::prepare(gaussians, num_classes);
  for (std::size_t k = 0; k < grid.dims[2]; ++k) {
    for (std::size_t j = 0; j < grid.dims[1]; ++j) {
      for (std::size_t i = 0; i < grid.dims[0]; ++i) {
        const std::size_t v = grid.linear({i, j, k});
        const Vec3 x = voxel_center_unchecked(grid, i, j, k);
        double* row = out.logits.values.data() + v * num_classes;
        for (const auto& g : prepared) {
          detail::accumulate(g, detail::weight_at(g, x), row, out.density.values[v], num_classes);
        }
      }
    }
  }
  out.evaluations = grid.voxel_count() * prepared.size();
  out.labels = labels_from_logits(out.logits, out.density, occupancy_threshold);
  return out;
}

}  // namespace gaussocc::reference
