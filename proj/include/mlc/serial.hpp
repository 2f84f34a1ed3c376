#pragma once

// Single-threaded reference versions of the OpenMP kernels. They share the
// per-item work functions with the parallel drivers and differ only in the
// loop, so tests can assert bit-identical output and the benchmarks can
// measure the speedup.

#include "mlc/consistency.hpp"
#include "mlc/evaluation.hpp"
#include "mlc/pseudolabel.hpp"
#include "mlc/reprojection.hpp"

namespace mlc::serial {

BoundaryStack build_stack(const std::vector<ViewFrame>& frames, std::size_t target,
                          BoundaryKind kind, std::span<const std::size_t> sources = {},
                          const ResampleOptions& opts = {});

PseudoLabel fuse(const BoundaryStack& stack, Estimator estimator,
                 double sigma_floor = kDefaultSigmaFloor);

DensityGrid density_map(std::span<const WorldPolyline> polylines, const GridSpec& spec);

RasterOverlap raster_overlap(const Polygon2& a, const Polygon2& b,
                             std::size_t raster = kDefaultRaster);

DepthMap layout_depth(const SphericalBoundary& floor,
                      const std::optional<SphericalBoundary>& ceiling, std::size_t width,
                      std::size_t height, double camera_height = kDefaultCameraHeight);

}  // namespace mlc::serial
