#pragma once

// Standard layout metrics: footprint IoU (2D), prism IoU (3D), and depth
// RMSE / delta1 with the camera height fixed to 1.6 m for prediction and
// ground truth alike.

#include "mlc/geometry.hpp"
#include "mlc/scene.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlc {

using Polygon2 = std::vector<Eigen::Vector2d>;

inline constexpr std::size_t kDefaultRaster = 1024;
inline constexpr double kDeltaThreshold = 1.25;

// (x, z) of each projected floor boundary point, in column order; implicitly closed.
Polygon2 floor_polygon(const SphericalBoundary& b, const CameraPose& pose);

// Cell counts of two even-odd filled polygons rasterized over their union
// bounding box at raster x raster cells.
struct RasterOverlap {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t both = 0;
  std::uint64_t either() const { return a + b - both; }
};

RasterOverlap raster_overlap(const Polygon2& a, const Polygon2& b,
                             std::size_t raster = kDefaultRaster);

double iou2d(const Polygon2& pred, const Polygon2& gt, std::size_t raster = kDefaultRaster);

// Vertical extent of a layout prism: floor `floor` below and ceiling `ceiling`
// above the camera.
struct VerticalExtent {
  double floor = kDefaultCameraHeight;
  double ceiling = 1.0;
};

double iou3d(const Polygon2& pred, VerticalExtent pred_extent, const Polygon2& gt,
             VerticalExtent gt_extent, std::size_t raster = kDefaultRaster);

// Horizontal distance from the camera to the layout surface hit by each pixel ray.
struct DepthMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> depth;  // row-major

  double at(std::size_t u, std::size_t v) const { return depth[v * width + u]; }
};

DepthMap layout_depth(const SphericalBoundary& floor,
                      const std::optional<SphericalBoundary>& ceiling, std::size_t width,
                      std::size_t height, double camera_height = kDefaultCameraHeight);

struct DepthMetrics {
  double rmse = 0.0;
  double delta1 = 0.0;
};

DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt);
DepthMetrics depth_metrics(std::span<const double> pred, std::span<const double> gt);

struct ViewEvaluation {
  std::string id;
  double iou2d = 0.0;
  std::optional<double> iou3d;
  double rmse = 0.0;
  double delta1 = 0.0;
};

struct LayoutEvalReport {
  double iou2d = 0.0;
  std::optional<double> iou3d;  // absent unless every view has ceilings on both sides
  double rmse = 0.0;
  double delta1 = 0.0;
  std::vector<ViewEvaluation> per_view;
};

struct EvalOptions {
  std::size_t raster = kDefaultRaster;
  bool depth = true;
};

ViewEvaluation evaluate_view(const ViewFrame& pred, const ViewFrame& gt,
                             const EvalOptions& opts = {});

// Means over views of the per-view metrics. Frames are matched by position.
LayoutEvalReport evaluate(const std::vector<ViewFrame>& pred, const std::vector<ViewFrame>& gt,
                          const EvalOptions& opts = {});

// Mean 2D IoU of the floor footprints only; cheap enough to track per iteration.
double mean_iou2d(const std::vector<ViewFrame>& pred, const std::vector<ViewFrame>& gt,
                  std::size_t raster = kDefaultRaster);

namespace detail {

struct RasterFrame {
  Eigen::Vector2d lo;
  double dx = 0.0;
  double dz = 0.0;
  std::size_t n = 0;
};

RasterFrame raster_frame(const Polygon2& a, const Polygon2& b, std::size_t raster);

// Half-open cell ranges [first, last) covered by the polygon in raster row `row`.
void row_spans(const Polygon2& poly, const RasterFrame& frame, std::size_t row,
               std::vector<double>& crossings, std::vector<std::pair<long, long>>& spans);

RasterOverlap row_overlap(const Polygon2& a, const Polygon2& b, const RasterFrame& frame,
                          std::size_t row, std::vector<double>& scratch,
                          std::vector<std::pair<long, long>>& sa,
                          std::vector<std::pair<long, long>>& sb);

double pixel_depth(const SphericalBoundary& floor, const std::optional<SphericalBoundary>& ceiling,
                   double h_floor, double h_ceil, std::size_t u, std::size_t v,
                   std::size_t height);

double ceiling_extent(const SphericalBoundary& floor,
                      const std::optional<SphericalBoundary>& ceiling, double camera_height);

}  // namespace detail

}  // namespace mlc
