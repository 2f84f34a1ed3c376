#include "mlc/consistency.hpp"

#include "mlc/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace mlc {

GridSpec grid_for(std::span<const WorldPolyline> polylines, std::size_t u, std::size_t v,
                  double padding) {
  if (polylines.empty()) throw ArgumentError("density map needs at least one polyline");
  if (u < 2 || v < 2) throw ArgumentError("grid must be at least 2x2");
  if (!(padding >= 0.0)) throw ArgumentError("grid padding must be non-negative");

  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  bool any = false;
  for (const auto& pl : polylines)
    for (const auto& p : pl.points) {
      const Eigen::Vector2d xz(p.x(), p.z());
      lo = lo.cwiseMin(xz);
      hi = hi.cwiseMax(xz);
      any = true;
    }
  if (!any) throw ArgumentError("density map polylines contain no points");

  const Eigen::Vector2d extent = (hi - lo) * (1.0 + 2.0 * padding);
  double cell = std::max(extent.x() / static_cast<double>(u), extent.y() / static_cast<double>(v));
  if (!(cell > 0.0)) cell = 1.0;

  GridSpec spec;
  spec.u = u;
  spec.v = v;
  spec.cell_size = cell;
  const Eigen::Vector2d center = 0.5 * (lo + hi);
  spec.origin = center - 0.5 * cell * Eigen::Vector2d(static_cast<double>(u), static_cast<double>(v));
  return spec;
}

std::pair<std::size_t, std::size_t> cell_of(const GridSpec& spec, const Eigen::Vector3d& p) {
  auto index = [&](double coord, double origin, std::size_t n) {
    const double f = std::floor((coord - origin) / spec.cell_size);
    if (!(f >= 0.0)) return std::size_t{0};
    return std::min(static_cast<std::size_t>(f), n - 1);
  };
  return {index(p.x(), spec.origin.x(), spec.u), index(p.z(), spec.origin.y(), spec.v)};
}

namespace detail {

void check_grid_args(std::span<const WorldPolyline> polylines, const GridSpec& spec) {
  if (polylines.empty()) throw ArgumentError("density map needs at least one polyline");
  if (spec.u < 2 || spec.v < 2) throw ArgumentError("grid must be at least 2x2");
  if (!(spec.cell_size > 0.0)) throw ArgumentError("grid cell size must be positive");
}

DensityGrid normalize_counts(const GridSpec& spec, const std::vector<std::uint64_t>& counts) {
  DensityGrid g;
  g.spec = spec;
  g.bins = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.u),
                                 static_cast<Eigen::Index>(spec.v));
  for (auto c : counts) g.samples += c;
  if (g.samples == 0) return g;
  const double total = static_cast<double>(g.samples);
  for (std::size_t j = 0; j < spec.v; ++j)
    for (std::size_t i = 0; i < spec.u; ++i)
      g.bins(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(counts[j * spec.u + i]) / total;
  return g;
}

}  // namespace detail

DensityGrid density_map(std::span<const WorldPolyline> polylines, const GridSpec& spec) {
  detail::check_grid_args(polylines, spec);
  const std::size_t cells = spec.u * spec.v;
  std::vector<std::uint64_t> counts(cells, 0);
  const auto n = static_cast<long>(polylines.size());

#pragma omp parallel
  {
    std::vector<std::uint64_t> local(cells, 0);
#pragma omp for schedule(static) nowait
    for (long i = 0; i < n; ++i)
      for (const auto& p : polylines[static_cast<std::size_t>(i)].points) {
        const auto [cu, cv] = cell_of(spec, p);
        ++local[cv * spec.u + cu];
      }
#pragma omp critical(mlc_density_merge)
    for (std::size_t c = 0; c < cells; ++c) counts[c] += local[c];
  }
  return detail::normalize_counts(spec, counts);
}

DensityGrid density_map(std::span<const WorldPolyline> polylines, std::size_t u, std::size_t v,
                        double padding) {
  return density_map(polylines, grid_for(polylines, u, v, padding));
}

double mlc_entropy(const DensityGrid& grid) {
  const double sum = grid.bins.sum();
  if (grid.bins.size() == 0 || std::abs(sum - 1.0) > 1e-9 || (grid.bins.array() < 0.0).any()) {
    std::ostringstream os;
    os << "entropy needs a normalized grid (sum of bins = " << sum << ")";
    throw StateError(os.str());
  }

  // Histogram grids carry their sample count; work from integer counts grouped
  // by value so uniform occupancy gives ln k exactly.
  if (grid.samples > 0) {
    const double total = static_cast<double>(grid.samples);
    std::map<std::uint64_t, std::uint64_t> groups;  // count -> cells
    bool integral = true;
    for (Eigen::Index k = 0; k < grid.bins.size() && integral; ++k) {
      const double p = grid.bins.data()[k];
      if (p == 0.0) continue;
      const double c = std::round(p * total);
      integral = c >= 1.0 && c / total == p;
      if (integral) ++groups[static_cast<std::uint64_t>(c)];
    }
    if (integral) {
      if (groups.size() == 1) return std::log(static_cast<double>(groups.begin()->second));
      double s = 0.0;
      for (const auto& [c, m] : groups)
        s += static_cast<double>(m) * static_cast<double>(c) * std::log(static_cast<double>(c));
      return std::max(0.0, std::log(total) - s / total);
    }
  }

  double h = 0.0;
  for (Eigen::Index j = 0; j < grid.bins.cols(); ++j)
    for (Eigen::Index i = 0; i < grid.bins.rows(); ++i) {
      const double p = grid.bins(i, j);
      if (p > 0.0) h -= p * std::log(p);
    }
  return h;
}

std::string density_pgm(const DensityGrid& grid) {
  const double peak = grid.bins.size() ? grid.bins.maxCoeff() : 0.0;
  if (!(peak > 0.0)) throw StateError("cannot render an empty density grid");
  std::ostringstream os;
  os << "P5\n" << grid.spec.u << ' ' << grid.spec.v << "\n255\n";
  std::string out = os.str();
  out.reserve(out.size() + grid.spec.u * grid.spec.v);
  for (std::size_t j = 0; j < grid.spec.v; ++j)
    for (std::size_t i = 0; i < grid.spec.u; ++i) {
      const double p = grid.bins(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * p / peak))));
    }
  return out;
}

void render_density(const DensityGrid& grid, const std::filesystem::path& path) {
  const std::string bytes = density_pgm(grid);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void write_density_csv(const DensityGrid& grid, std::ostream& os) {
  os << "u,v,phi\n";
  os << std::setprecision(17);
  for (std::size_t j = 0; j < grid.spec.v; ++j)
    for (std::size_t i = 0; i < grid.spec.u; ++i) {
      const double p = grid.bins(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (p > 0.0) os << i << ',' << j << ',' << p << '\n';
    }
}

}  // namespace mlc
