#pragma once

// Top-view density of projected layout boundaries and its entropy, the
// ground-truth-free consistency score: well-aligned multi-view layouts pile up
// in few cells and give low entropy.

#include "mlc/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mlc {

inline constexpr std::size_t kDefaultGridSize = 512;
inline constexpr double kDefaultGridPadding = 0.05;

// Square cells; u indexes world x, v indexes world z.
struct GridSpec {
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double cell_size = 1.0;
  std::size_t u = kDefaultGridSize;
  std::size_t v = kDefaultGridSize;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct DensityGrid {
  GridSpec spec;
  Eigen::MatrixXd bins;  // u x v
  std::uint64_t samples = 0;
};

// Grid covering the (x, z) bounding box of every point, grown by `padding`
// of the extent on each side and centered.
GridSpec grid_for(std::span<const WorldPolyline> polylines, std::size_t u, std::size_t v,
                  double padding = kDefaultGridPadding);

// Cell of a world point. Points outside the grid land in the nearest border cell.
std::pair<std::size_t, std::size_t> cell_of(const GridSpec& spec, const Eigen::Vector3d& p);

// Normalized histogram of every polyline point on a fixed grid.
DensityGrid density_map(std::span<const WorldPolyline> polylines, const GridSpec& spec);

DensityGrid density_map(std::span<const WorldPolyline> polylines, std::size_t u, std::size_t v,
                        double padding = kDefaultGridPadding);

// Shannon entropy in nats; 0 * ln 0 = 0.
double mlc_entropy(const DensityGrid& grid);

// Binary PGM (P5): width U, height V, pixel (u, v) = round(255 * bin / max bin).
std::string density_pgm(const DensityGrid& grid);
void render_density(const DensityGrid& grid, const std::filesystem::path& path);

// "u,v,phi" rows for occupied cells, row-major in v then u.
void write_density_csv(const DensityGrid& grid, std::ostream& os);

namespace detail {
void check_grid_args(std::span<const WorldPolyline> polylines, const GridSpec& spec);
DensityGrid normalize_counts(const GridSpec& spec, const std::vector<std::uint64_t>& counts);
}  // namespace detail

}  // namespace mlc
