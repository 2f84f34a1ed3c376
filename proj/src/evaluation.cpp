#include "mlc/evaluation.hpp"

#include "mlc/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mlc {

Polygon2 floor_polygon(const SphericalBoundary& b, const CameraPose& pose) {
  if (b.kind() != BoundaryKind::Floor) throw ArgumentError("floor_polygon needs a floor boundary");
  const WorldPolyline poly = boundary_to_world(b, pose);
  Polygon2 out;
  out.reserve(poly.points.size());
  for (const auto& p : poly.points) out.emplace_back(p.x(), p.z());
  return out;
}

namespace detail {

RasterFrame raster_frame(const Polygon2& a, const Polygon2& b, std::size_t raster) {
  if (raster < 64) throw ArgumentError("raster resolution must be at least 64");
  if (a.size() < 3 || b.size() < 3) throw ArgumentError("polygons need at least three vertices");
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  for (const auto* poly : {&a, &b})
    for (const auto& p : *poly) {
      if (!p.allFinite()) throw ArgumentError("polygon has non-finite vertices");
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  RasterFrame f;
  f.lo = lo;
  f.n = raster;
  f.dx = (hi.x() - lo.x()) / static_cast<double>(raster);
  f.dz = (hi.y() - lo.y()) / static_cast<double>(raster);
  if (!(f.dx > 0.0) || !(f.dz > 0.0)) throw DegenerateGeometryError("IoU undefined: polygons have empty union");
  return f;
}

void row_spans(const Polygon2& poly, const RasterFrame& frame, std::size_t row,
               std::vector<double>& crossings, std::vector<std::pair<long, long>>& spans) {
  crossings.clear();
  spans.clear();
  const double z = frame.lo.y() + (static_cast<double>(row) + 0.5) * frame.dz;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % n];
    if ((p.y() <= z && z < q.y()) || (q.y() <= z && z < p.y()))
      crossings.push_back(p.x() + (z - p.y()) * (q.x() - p.x()) / (q.y() - p.y()));
  }
  std::sort(crossings.begin(), crossings.end());
  const auto cells = static_cast<long>(frame.n);
  for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
    // Cells whose centers fall in [x0, x1).
    long first = static_cast<long>(std::ceil((crossings[i] - frame.lo.x()) / frame.dx - 0.5));
    long last = static_cast<long>(std::ceil((crossings[i + 1] - frame.lo.x()) / frame.dx - 0.5));
    first = std::clamp(first, 0L, cells);
    last = std::clamp(last, 0L, cells);
    if (last > first) spans.emplace_back(first, last);
  }
}

RasterOverlap row_overlap(const Polygon2& a, const Polygon2& b, const RasterFrame& frame,
                          std::size_t row, std::vector<double>& scratch,
                          std::vector<std::pair<long, long>>& sa,
                          std::vector<std::pair<long, long>>& sb) {
  row_spans(a, frame, row, scratch, sa);
  row_spans(b, frame, row, scratch, sb);
  RasterOverlap r;
  for (const auto& [f, l] : sa) r.a += static_cast<std::uint64_t>(l - f);
  for (const auto& [f, l] : sb) r.b += static_cast<std::uint64_t>(l - f);
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const long lo = std::max(sa[i].first, sb[j].first);
    const long hi = std::min(sa[i].second, sb[j].second);
    if (hi > lo) r.both += static_cast<std::uint64_t>(hi - lo);
    if (sa[i].second < sb[j].second) ++i; else ++j;
  }
  return r;
}

double ceiling_extent(const SphericalBoundary& floor,
                      const std::optional<SphericalBoundary>& ceiling, double camera_height) {
  if (!ceiling) return std::numeric_limits<double>::infinity();
  return ceiling_height(floor, *ceiling, camera_height);
}

double pixel_depth(const SphericalBoundary& floor, const std::optional<SphericalBoundary>& ceiling,
                   double h_floor, double h_ceil, std::size_t u, std::size_t v,
                   std::size_t height) {
  const double lat = row_to_latitude(static_cast<double>(v), height);
  const double lat_f = floor[u];
  if (lat < lat_f) return h_floor / std::tan(-lat);
  if (ceiling && lat > (*ceiling)[u]) return h_ceil / std::tan(lat);
  return h_floor / std::tan(-lat_f);
}

}  // namespace detail

RasterOverlap raster_overlap(const Polygon2& a, const Polygon2& b, std::size_t raster) {
  const auto frame = detail::raster_frame(a, b, raster);
  std::uint64_t ca = 0, cb = 0, both = 0;
  const auto rows = static_cast<long>(frame.n);
#pragma omp parallel reduction(+ : ca, cb, both)
  {
    std::vector<double> scratch;
    std::vector<std::pair<long, long>> sa, sb;
#pragma omp for schedule(static)
    for (long r = 0; r < rows; ++r) {
      const auto o = detail::row_overlap(a, b, frame, static_cast<std::size_t>(r), scratch, sa, sb);
      ca += o.a;
      cb += o.b;
      both += o.both;
    }
  }
  return {ca, cb, both};
}

double iou2d(const Polygon2& pred, const Polygon2& gt, std::size_t raster) {
  const auto o = raster_overlap(pred, gt, raster);
  if (o.either() == 0) throw DegenerateGeometryError("IoU undefined: polygons have empty union");
  return static_cast<double>(o.both) / static_cast<double>(o.either());
}

double iou3d(const Polygon2& pred, VerticalExtent pred_extent, const Polygon2& gt,
             VerticalExtent gt_extent, std::size_t raster) {
  for (const auto& e : {pred_extent, gt_extent})
    if (!(e.floor > 0.0) || !(e.ceiling > 0.0)) throw ArgumentError("vertical extents must be positive");
  const auto o = raster_overlap(pred, gt, raster);
  const double hp = pred_extent.floor + pred_extent.ceiling;
  const double hg = gt_extent.floor + gt_extent.ceiling;
  const double overlap = std::max(0.0, std::min(pred_extent.floor, gt_extent.floor) +
                                           std::min(pred_extent.ceiling, gt_extent.ceiling));
  const double inter = static_cast<double>(o.both) * overlap;
  const double uni = static_cast<double>(o.a) * hp + static_cast<double>(o.b) * hg - inter;
  if (!(uni > 0.0)) throw DegenerateGeometryError("3D IoU undefined: prisms have empty union");
  return inter / uni;
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
  DepthMap map;
  map.width = width;
  map.height = height;
  map.depth.assign(width * height, 0.0);
  const auto rows = static_cast<long>(height);
#pragma omp parallel for schedule(static)
  for (long v = 0; v < rows; ++v)
    for (std::size_t u = 0; u < width; ++u)
      map.depth[static_cast<std::size_t>(v) * width + u] = detail::pixel_depth(
          floor, ceiling, camera_height, h_ceil, u, static_cast<std::size_t>(v), height);
  return map;
}

DepthMetrics depth_metrics(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size() || pred.empty())
    throw ArgumentError("depth maps must be non-empty and the same size");
  std::size_t bad = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (!std::isfinite(pred[i]) || !std::isfinite(gt[i]) || !(pred[i] > 0.0) || !(gt[i] > 0.0)) ++bad;
  if (bad) {
    std::ostringstream os;
    os << bad << " depth pixel(s) are non-finite or non-positive";
    throw DegenerateGeometryError(os.str());
  }
  double sq = 0.0;
  std::size_t within = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - gt[i];
    sq += d * d;
    if (std::max(pred[i] / gt[i], gt[i] / pred[i]) < kDeltaThreshold) ++within;
  }
  const double n = static_cast<double>(pred.size());
  return {std::sqrt(sq / n), static_cast<double>(within) / n};
}

DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt) {
  if (pred.width != gt.width || pred.height != gt.height)
    throw ArgumentError("depth maps differ in resolution");
  return depth_metrics(std::span<const double>(pred.depth), std::span<const double>(gt.depth));
}

namespace {
const CameraPose& eval_pose() {
  static const CameraPose pose = CameraPose::upright(0.0, Eigen::Vector3d::Zero(), kDefaultCameraHeight);
  return pose;
}
}  // namespace

ViewEvaluation evaluate_view(const ViewFrame& pred, const ViewFrame& gt, const EvalOptions& opts) {
  ViewEvaluation ev;
  ev.id = pred.id;
  const Polygon2 pp = floor_polygon(pred.floor, eval_pose());
  const Polygon2 gp = floor_polygon(gt.floor, eval_pose());
  ev.iou2d = iou2d(pp, gp, opts.raster);
  if (pred.ceiling && gt.ceiling) {
    const VerticalExtent pe{kDefaultCameraHeight,
                            ceiling_height(pred.floor, *pred.ceiling, kDefaultCameraHeight)};
    const VerticalExtent ge{kDefaultCameraHeight,
                            ceiling_height(gt.floor, *gt.ceiling, kDefaultCameraHeight)};
    ev.iou3d = iou3d(pp, pe, gp, ge, opts.raster);
  }
  if (opts.depth) {
    const std::size_t w = gt.floor.width();
    const auto dp = layout_depth(pred.floor, pred.ceiling, w, w / 2);
    const auto dg = layout_depth(gt.floor, gt.ceiling, w, w / 2);
    const auto m = depth_metrics(dp, dg);
    ev.rmse = m.rmse;
    ev.delta1 = m.delta1;
  }
  return ev;
}

LayoutEvalReport evaluate(const std::vector<ViewFrame>& pred, const std::vector<ViewFrame>& gt,
                          const EvalOptions& opts) {
  if (pred.empty() || pred.size() != gt.size())
    throw ArgumentError("prediction and ground truth must have the same, non-zero view count");
  LayoutEvalReport rep;
  bool all3d = true;
  double s3 = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].floor.width() != gt[i].floor.width())
      throw ArgumentError("prediction and ground truth differ in width for view '" + pred[i].id + "'");
    rep.per_view.push_back(evaluate_view(pred[i], gt[i], opts));
    const auto& ev = rep.per_view.back();
    rep.iou2d += ev.iou2d;
    rep.rmse += ev.rmse;
    rep.delta1 += ev.delta1;
    if (ev.iou3d) s3 += *ev.iou3d; else all3d = false;
  }
  const double n = static_cast<double>(pred.size());
  rep.iou2d /= n;
  rep.rmse /= n;
  rep.delta1 /= n;
  if (all3d) rep.iou3d = s3 / n;
  return rep;
}

double mean_iou2d(const std::vector<ViewFrame>& pred, const std::vector<ViewFrame>& gt,
                  std::size_t raster) {
  if (pred.empty() || pred.size() != gt.size())
    throw ArgumentError("prediction and ground truth must have the same, non-zero view count");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    s += iou2d(floor_polygon(pred[i].floor, eval_pose()), floor_polygon(gt[i].floor, eval_pose()),
               raster);
  return s / static_cast<double>(pred.size());
}

}  // namespace mlc
