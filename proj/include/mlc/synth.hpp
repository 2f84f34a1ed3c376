#pragma once

// Synthetic rooms with analytically exact boundaries, plus controlled
// boundary and pose noise. Every random draw goes through SplitMix64 with one
// substream per view, so scenes are reproducible from (room, views, width, seed).

#include "mlc/evaluation.hpp"
#include "mlc/geometry.hpp"
#include "mlc/scene.hpp"

#include <cstdint>

namespace mlc {

struct RoomSpec {
  Polygon2 footprint;  // (x, z), counter-clockwise, simple
  double h_floor = kDefaultCameraHeight;
  double h_ceil = 1.2;

  void validate() const;
};

RoomSpec square_room(double side, double h_floor = kDefaultCameraHeight, double h_ceil = 1.2);
// `size` x `size` square with the (+x, +z) quarter removed.
RoomSpec lshape_room(double size, double h_floor = kDefaultCameraHeight, double h_ceil = 1.2);
RoomSpec ngon_room(std::size_t sides, double radius, double h_floor = kDefaultCameraHeight,
                   double h_ceil = 1.2);

struct NoiseSpec {
  double boundary_std = 0.0;
  double outlier_rate = 0.0;
  double outlier_std = 0.0;
  double pose_trans_std = 0.0;
  double pose_rot_std = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthOptions {
  double wall_clearance = 0.2;
  std::size_t max_attempts = 100;  // per camera
  bool with_ceiling = true;
};

double polygon_area(const Polygon2& poly);
bool is_simple(const Polygon2& poly);

// Inside the polygon's kernel: every wall point is visible from p.
bool star_visible(const Polygon2& poly, const Eigen::Vector2d& p);
double distance_to_walls(const Polygon2& poly, const Eigen::Vector2d& p);

// Distance along the ray to the first wall hit; +inf if none.
double ray_polygon_distance(const Polygon2& poly, const Eigen::Vector2d& origin,
                            const Eigen::Vector2d& dir);

// Exact boundary of `room` seen from `pose` (camera at floor height room.h_floor).
SphericalBoundary exact_boundary(const RoomSpec& room, const CameraPose& pose, std::size_t width,
                                 BoundaryKind kind);

Scene generate_scene(const RoomSpec& room, std::size_t n_views, std::size_t width,
                     std::uint64_t seed, const SynthOptions& opts = {});

// Applies noise to frames only; ground truth is left untouched.
Scene perturb(const Scene& scene, const NoiseSpec& noise, double lat_min = kDefaultLatMin);

}  // namespace mlc
