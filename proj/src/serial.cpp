#include "mlc/serial.hpp"

#include "mlc/error.hpp"

namespace mlc::serial {

BoundaryStack build_stack(const std::vector<ViewFrame>& frames, std::size_t target,
                          BoundaryKind kind, std::span<const std::size_t> sources,
                          const ResampleOptions& opts) {
  auto src = detail::resolve_sources(frames.size(), target, sources);
  const std::size_t width = frames[target].boundary(kind).width();
  std::vector<ResampledColumns> columns;
  columns.reserve(src.size());
  for (std::size_t s : src) columns.push_back(detail::stack_column(frames, target, s, kind, opts));
  return detail::assemble_stack(target, kind, std::move(src), columns, width);
}

PseudoLabel fuse(const BoundaryStack& stack, Estimator estimator, double sigma_floor) {
  detail::check_fuse_args(stack, sigma_floor);
  const std::size_t w = stack.width();
  PseudoLabel out;
  out.lat_bar.assign(w, 0.0);
  out.sigma.assign(w, 0.0);
  out.support.assign(w, 0);
  std::vector<double> scratch;
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(w); ++r)
    detail::fuse_column(stack, r, estimator, sigma_floor, scratch, out);
  return out;
}

DensityGrid density_map(std::span<const WorldPolyline> polylines, const GridSpec& spec) {
  detail::check_grid_args(polylines, spec);
  std::vector<std::uint64_t> counts(spec.u * spec.v, 0);
  for (const auto& pl : polylines)
    for (const auto& p : pl.points) {
      const auto [cu, cv] = cell_of(spec, p);
      ++counts[cv * spec.u + cu];
    }
  return detail::normalize_counts(spec, counts);
}

RasterOverlap raster_overlap(const Polygon2& a, const Polygon2& b, std::size_t raster) {
  const auto frame = detail::raster_frame(a, b, raster);
  RasterOverlap total;
  std::vector<double> scratch;
  std::vector<std::pair<long, long>> sa, sb;
  for (std::size_t r = 0; r < frame.n; ++r) {
    const auto o = detail::row_overlap(a, b, frame, r, scratch, sa, sb);
    total.a += o.a;
    total.b += o.b;
    total.both += o.both;
  }
  return total;
}

DepthMap layout_depth(const SphericalBoundary& floor,
                      const std::optional<SphericalBoundary>& ceiling, std::size_t width,
                      std::size_t height, double camera_height) {
  if (floor.kind() != BoundaryKind::Floor) throw ArgumentError("layout_depth needs a floor boundary");
  if (width != floor.width() || (ceiling && ceiling->width() != width))
    throw ArgumentError("depth map width must match the boundary width");
  if (height < 2) throw ArgumentError("depth map needs at least two rows");
  if (!(camera_height > 0.0)) throw ArgumentError("camera height must be positive");
  const double h_ceil = detail::ceiling_extent(floor, ceiling, camera_height);
  DepthMap map{width, height, std::vector<double>(width * height)};
  for (std::size_t v = 0; v < height; ++v)
    for (std::size_t u = 0; u < width; ++u)
      map.depth[v * width + u] = detail::pixel_depth(floor, ceiling, camera_height, h_ceil, u, v, height);
  return map;
}

}  // namespace mlc::serial
