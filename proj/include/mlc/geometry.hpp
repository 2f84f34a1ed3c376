#pragma once

// Equirectangular camera model for room-layout boundaries.
//
// Camera frame: X right, Y down, Z forward. The floor plane sits at
// y = +floor_height and the ceiling at y = -ceiling_height, so floor boundary
// latitudes are negative and ceiling latitudes positive. Longitude is measured
// from +Z towards +X.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mlc {

enum class BoundaryKind { Floor, Ceiling };

const char* to_string(BoundaryKind kind);

inline constexpr double kDefaultLatMin = 1e-4;
inline constexpr double kDefaultCameraHeight = 1.6;
inline constexpr std::size_t kMinColumns = 8;

// One view's layout boundary: one latitude (radians) per panorama column.
class SphericalBoundary {
 public:
  SphericalBoundary(std::vector<double> lat, BoundaryKind kind);

  std::span<const double> lat() const { return lat_; }
  double operator[](std::size_t col) const { return lat_[col]; }
  std::size_t width() const { return lat_.size(); }
  BoundaryKind kind() const { return kind_; }

  const std::vector<double>& values() const { return lat_; }

  friend bool operator==(const SphericalBoundary&, const SphericalBoundary&) = default;

 private:
  std::vector<double> lat_;
  BoundaryKind kind_;
};

// Rigid camera-to-world transform plus the plane distances used to lift
// boundaries to 3D. world = rotation * camera + translation.
class CameraPose {
 public:
  CameraPose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation,
             double floor_height = kDefaultCameraHeight,
             std::optional<double> ceiling_height = std::nullopt);

  // Rotation about the (downward) Y axis only.
  static CameraPose upright(double yaw, const Eigen::Vector3d& translation,
                            double floor_height = kDefaultCameraHeight);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  double floor_height() const { return floor_height_; }
  const std::optional<double>& ceiling_height() const { return ceiling_height_; }

  CameraPose with_ceiling_height(double h) const;
  CameraPose with_floor_height(double h) const;

  // g * this, i.e. the pose after moving the whole rig by g.
  CameraPose transformed(const Eigen::Isometry3d& g) const;

  Eigen::Vector3d to_world(const Eigen::Vector3d& camera_point) const {
    return rotation_ * camera_point + translation_;
  }
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world_point) const {
    return rotation_.transpose() * (world_point - translation_);
  }

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
  double floor_height_;
  std::optional<double> ceiling_height_;
};

// Validates a rotation matrix to within `tol`; throws ValidationError.
void check_rotation(const Eigen::Matrix3d& r, double tol);

// Closest rotation in the Frobenius sense (SVD projection onto SO(3)).
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m);

struct WorldPolyline {
  std::vector<Eigen::Vector3d> points;
  std::size_t source_view = 0;
  BoundaryKind kind = BoundaryKind::Floor;
};

struct SphericalSample {
  double lon = 0.0;
  double lat = 0.0;
};

struct SphericalAngles {
  double lon;
  double lat;
};

// Pixel-center convention: lon = 2*pi*(u+0.5)/W - pi, lat = pi/2 - pi*(v+0.5)/H.
SphericalAngles pixel_to_spherical(std::size_t u, std::size_t v, std::size_t width,
                                   std::size_t height);

// Longitude of column `u` (pixel center) for a panorama `width` columns wide.
double column_longitude(std::size_t u, std::size_t width);

// Inverse of the row half of pixel_to_spherical, continuous in v.
double row_to_latitude(double v, std::size_t height);

// Unit bearing in the camera frame for (lon, lat).
Eigen::Vector3d bearing(double lon, double lat);

// Lifts every column of `b` onto its floor or ceiling plane and moves it to
// world coordinates. Ceiling boundaries need pose.ceiling_height().
WorldPolyline boundary_to_world(const SphericalBoundary& b, const CameraPose& pose,
                                double lat_min = kDefaultLatMin);

// Spherical angles of each world point as seen from `pose`, in input order.
std::vector<SphericalSample> world_to_boundary_samples(const WorldPolyline& poly,
                                                       const CameraPose& pose);

// Ceiling distance implied by a floor/ceiling boundary pair under vertical walls.
double ceiling_height(const SphericalBoundary& floor, const SphericalBoundary& ceiling,
                      double floor_height);

// Wraps an angle to [-pi, pi).
double wrap_angle(double a);

}  // namespace mlc
