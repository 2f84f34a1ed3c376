#include "mlc/synth.hpp"

#include "mlc/error.hpp"
#include "mlc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace mlc {

using std::numbers::pi;

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
  const double d1 = cross2(q2 - q1, p1 - q1);
  const double d2 = cross2(q2 - q1, p2 - q1);
  const double d3 = cross2(p2 - p1, q1 - p1);
  const double d4 = cross2(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

}  // namespace

double polygon_area(const Polygon2& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

bool is_simple(const Polygon2& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  return true;
}

void RoomSpec::validate() const {
  if (footprint.size() < 3) throw ArgumentError("room footprint needs at least three vertices");
  if (!is_simple(footprint)) throw ArgumentError("room footprint is self-intersecting");
  if (!(polygon_area(footprint) > 0.0))
    throw ArgumentError("room footprint must be counter-clockwise with positive area");
  if (!(h_floor > 0.0) || !(h_ceil > 0.0)) throw ArgumentError("room heights must be positive");
}

void NoiseSpec::validate() const {
  if (!(boundary_std >= 0.0) || !(outlier_std >= 0.0) || !(pose_trans_std >= 0.0) ||
      !(pose_rot_std >= 0.0))
    throw ArgumentError("noise standard deviations must be non-negative");
  if (!(outlier_rate >= 0.0 && outlier_rate < 1.0)) throw ArgumentError("outlier rate must be in [0, 1)");
}

RoomSpec square_room(double side, double h_floor, double h_ceil) {
  if (!(side > 0.0)) throw ArgumentError("room size must be positive");
  const double s = side / 2;
  RoomSpec r{{{-s, -s}, {s, -s}, {s, s}, {-s, s}}, h_floor, h_ceil};
  r.validate();
  return r;
}

RoomSpec lshape_room(double size, double h_floor, double h_ceil) {
  if (!(size > 0.0)) throw ArgumentError("room size must be positive");
  const double s = size / 2;
  RoomSpec r{{{-s, -s}, {s, -s}, {s, 0.0}, {0.0, 0.0}, {0.0, s}, {-s, s}}, h_floor, h_ceil};
  r.validate();
  return r;
}

RoomSpec ngon_room(std::size_t sides, double radius, double h_floor, double h_ceil) {
  if (sides < 3) throw ArgumentError("n-gon room needs at least three sides");
  if (!(radius > 0.0)) throw ArgumentError("room size must be positive");
  RoomSpec r;
  r.h_floor = h_floor;
  r.h_ceil = h_ceil;
  for (std::size_t i = 0; i < sides; ++i) {
    const double a = 2.0 * pi * static_cast<double>(i) / static_cast<double>(sides);
    r.footprint.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  r.validate();
  return r;
}

bool star_visible(const Polygon2& poly, const Eigen::Vector2d& p) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % poly.size()];
    if (cross2(b - a, p - a) <= 0.0) return false;
  }
  return true;
}

double distance_to_walls(const Polygon2& poly, const Eigen::Vector2d& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % poly.size()];
    const Eigen::Vector2d ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * ab - p).norm());
  }
  return best;
}

double ray_polygon_distance(const Polygon2& poly, const Eigen::Vector2d& origin,
                            const Eigen::Vector2d& dir) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d e = poly[(i + 1) % poly.size()] - a;
    const double denom = cross2(dir, e);
    if (denom == 0.0) continue;
    const Eigen::Vector2d ao = a - origin;
    const double t = cross2(ao, e) / denom;  // along the ray
    const double s = cross2(ao, dir) / denom;  // along the edge
    if (t > 0.0 && s >= 0.0 && s <= 1.0) best = std::min(best, t);
  }
  return best;
}

SphericalBoundary exact_boundary(const RoomSpec& room, const CameraPose& pose, std::size_t width,
                                 BoundaryKind kind) {
  const Eigen::Vector2d origin(pose.translation().x(), pose.translation().z());
  std::vector<double> lat(width);
  for (std::size_t col = 0; col < width; ++col) {
    const double lon = column_longitude(col, width);
    const Eigen::Vector3d d = pose.rotation() * Eigen::Vector3d(std::sin(lon), 0.0, std::cos(lon));
    const Eigen::Vector2d dir(d.x(), d.z());
    const double dist = ray_polygon_distance(room.footprint, origin, dir.normalized());
    if (!std::isfinite(dist)) throw GenerationError("camera ray leaves the room without hitting a wall");
    lat[col] = kind == BoundaryKind::Floor ? -std::atan(room.h_floor / dist)
                                           : std::atan(room.h_ceil / dist);
  }
  return SphericalBoundary(std::move(lat), kind);
}

Scene generate_scene(const RoomSpec& room, std::size_t n_views, std::size_t width,
                     std::uint64_t seed, const SynthOptions& opts) {
  room.validate();
  if (n_views == 0) throw ArgumentError("scene needs at least one view");
  if (width < kMinColumns) throw ArgumentError("panorama width too small");

  Eigen::Vector2d lo = room.footprint.front(), hi = room.footprint.front();
  for (const auto& p : room.footprint) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }

  Scene scene;
  scene.width = width;
  scene.height = width / 2;
  scene.meta.rng = SplitMix64::kName;
  scene.meta.seed = seed;
  const SplitMix64 master(seed);
  for (std::size_t i = 0; i < n_views; ++i) {
    SplitMix64 rng = master.split(i);
    std::optional<Eigen::Vector2d> pos;
    for (std::size_t attempt = 0; attempt < opts.max_attempts && !pos; ++attempt) {
      const Eigen::Vector2d p(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()));
      if (star_visible(room.footprint, p) &&
          distance_to_walls(room.footprint, p) >= opts.wall_clearance)
        pos = p;
    }
    if (!pos) {
      std::ostringstream os;
      os << "could not place camera " << i << " after " << opts.max_attempts << " attempts";
      throw GenerationError(os.str());
    }
    const double yaw = rng.uniform(-pi, pi);
    const CameraPose pose =
        CameraPose::upright(yaw, Eigen::Vector3d(pos->x(), 0.0, pos->y()), room.h_floor);

    char id[32];
    std::snprintf(id, sizeof(id), "view_%03zu", i);
    ViewFrame frame{id, pose, exact_boundary(room, pose, width, BoundaryKind::Floor), std::nullopt,
                    false};
    if (opts.with_ceiling) frame.ceiling = exact_boundary(room, pose, width, BoundaryKind::Ceiling);
    scene.frames.push_back(std::move(frame));
  }
  scene.ground_truth = scene.frames;
  return scene;
}

namespace {

SphericalBoundary perturb_boundary(const SphericalBoundary& b, const NoiseSpec& noise,
                                   double lat_min, SplitMix64& rng) {
  std::vector<double> lat(b.values());
  const bool floor = b.kind() == BoundaryKind::Floor;
  const double lo = floor ? -pi / 2 + lat_min : lat_min;
  const double hi = floor ? -lat_min : pi / 2 - lat_min;
  for (double& v : lat) {
    const double u = rng.uniform();
    const double n_regular = rng.normal();
    const double n_outlier = rng.normal();
    const double moved = u < noise.outlier_rate ? v + noise.outlier_std * n_outlier
                                                : v + noise.boundary_std * n_regular;
    if (moved != v) v = std::clamp(moved, lo, hi);
  }
  return SphericalBoundary(std::move(lat), b.kind());
}

}  // namespace

Scene perturb(const Scene& scene, const NoiseSpec& noise, double lat_min) {
  noise.validate();
  Scene out = scene;
  // Keyed apart from generate_scene's streams so equal seeds stay independent.
  const SplitMix64 master = SplitMix64(noise.seed).split(0x6e6f697365ULL);
  for (std::size_t i = 0; i < out.frames.size(); ++i) {
    SplitMix64 rng = master.split(i);
    ViewFrame& f = out.frames[i];
    const double dx = rng.normal(), dz = rng.normal(), dyaw = rng.normal();
    if (noise.pose_trans_std > 0.0 || noise.pose_rot_std > 0.0) {
      Eigen::Vector3d t = f.pose.translation();
      t.x() += noise.pose_trans_std * dx;
      t.z() += noise.pose_trans_std * dz;
      const Eigen::Matrix3d r =
          f.pose.rotation() *
          Eigen::AngleAxisd(noise.pose_rot_std * dyaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
      f.pose = CameraPose(r, t, f.pose.floor_height(), f.pose.ceiling_height());
    }
    f.floor = perturb_boundary(f.floor, noise, lat_min, rng);
    if (f.ceiling) f.ceiling = perturb_boundary(*f.ceiling, noise, lat_min, rng);
  }
  return out;
}

}  // namespace mlc
