#include "mlc/geometry.hpp"

#include "mlc/error.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

namespace mlc {

using std::numbers::pi;

const char* to_string(BoundaryKind kind) {
  return kind == BoundaryKind::Floor ? "floor" : "ceiling";
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Format: return "format";
    case ErrorKind::Io: return "io";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::DegenerateGeometry: return "degenerate_geometry";
    case ErrorKind::InsufficientCoverage: return "insufficient_coverage";
    case ErrorKind::InconsistentBoundaries: return "inconsistent_boundaries";
    case ErrorKind::State: return "state";
    case ErrorKind::Generation: return "generation";
  }
  return "unknown";
}

SphericalBoundary::SphericalBoundary(std::vector<double> lat, BoundaryKind kind)
    : lat_(std::move(lat)), kind_(kind) {
  if (lat_.size() < kMinColumns) {
    std::ostringstream os;
    os << "boundary needs at least " << kMinColumns << " columns, got " << lat_.size();
    throw ValidationError(os.str());
  }
  for (std::size_t i = 0; i < lat_.size(); ++i) {
    const double v = lat_[i];
    const bool ok = std::isfinite(v) &&
                    (kind_ == BoundaryKind::Floor ? (v < 0.0 && v > -pi / 2)
                                                  : (v > 0.0 && v < pi / 2));
    if (!ok) {
      std::ostringstream os;
      os << to_string(kind_) << " boundary column " << i << " has invalid latitude " << v;
      throw ValidationError(os.str());
    }
  }
}

void check_rotation(const Eigen::Matrix3d& r, double tol) {
  if (!r.allFinite()) throw ValidationError("rotation has non-finite entries");
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  const double det = r.determinant();
  if (ortho > tol || std::abs(det - 1.0) > tol) {
    std::ostringstream os;
    os << "rotation is not in SO(3): max|R^T R - I| = " << ortho << ", det = " << det;
    throw ValidationError(os.str());
  }
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

CameraPose::CameraPose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation,
                       double floor_height, std::optional<double> ceiling_height)
    : rotation_(rotation),
      translation_(translation),
      floor_height_(floor_height),
      ceiling_height_(ceiling_height) {
  check_rotation(rotation_, 1e-9);
  if (!translation_.allFinite()) throw ValidationError("translation has non-finite entries");
  if (!(floor_height_ > 0.0) || !std::isfinite(floor_height_))
    throw ValidationError("floor height must be positive");
  if (ceiling_height_ && (!(*ceiling_height_ > 0.0) || !std::isfinite(*ceiling_height_)))
    throw ValidationError("ceiling height must be positive");
}

CameraPose CameraPose::upright(double yaw, const Eigen::Vector3d& translation,
                               double floor_height) {
  const Eigen::Matrix3d r = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
  return CameraPose(r, translation, floor_height);
}

CameraPose CameraPose::with_ceiling_height(double h) const {
  return CameraPose(rotation_, translation_, floor_height_, h);
}

CameraPose CameraPose::with_floor_height(double h) const {
  return CameraPose(rotation_, translation_, h, ceiling_height_);
}

CameraPose CameraPose::transformed(const Eigen::Isometry3d& g) const {
  return CameraPose(g.linear() * rotation_, g.linear() * translation_ + g.translation(),
                    floor_height_, ceiling_height_);
}

double column_longitude(std::size_t u, std::size_t width) {
  return 2.0 * pi * (static_cast<double>(u) + 0.5) / static_cast<double>(width) - pi;
}

double row_to_latitude(double v, std::size_t height) {
  return pi / 2 - pi * (v + 0.5) / static_cast<double>(height);
}

SphericalAngles pixel_to_spherical(std::size_t u, std::size_t v, std::size_t width,
                                   std::size_t height) {
  if (width == 0 || height == 0 || u >= width || v >= height) {
    std::ostringstream os;
    os << "pixel (" << u << ", " << v << ") outside " << width << "x" << height << " panorama";
    throw ArgumentError(os.str());
  }
  return {column_longitude(u, width), row_to_latitude(static_cast<double>(v), height)};
}

Eigen::Vector3d bearing(double lon, double lat) {
  return {std::cos(lat) * std::sin(lon), -std::sin(lat), std::cos(lat) * std::cos(lon)};
}

double wrap_angle(double a) {
  double w = std::fmod(a + pi, 2.0 * pi);
  if (w < 0) w += 2.0 * pi;
  w -= pi;
  return w >= pi ? w - 2.0 * pi : w;
}

WorldPolyline boundary_to_world(const SphericalBoundary& b, const CameraPose& pose,
                                double lat_min) {
  double h = pose.floor_height();
  double sign = 1.0;
  if (b.kind() == BoundaryKind::Ceiling) {
    if (!pose.ceiling_height())
      throw StateError("ceiling boundary projected before its ceiling height was resolved");
    h = *pose.ceiling_height();
    sign = -1.0;
  }

  WorldPolyline out;
  out.kind = b.kind();
  out.points.reserve(b.width());
  const std::size_t w = b.width();
  for (std::size_t col = 0; col < w; ++col) {
    const double lat = b[col];
    if (std::abs(lat) < lat_min) {
      std::ostringstream os;
      os << "column " << col << " latitude " << lat << " is within " << lat_min
         << " rad of the horizon";
      throw SingularityError(os.str());
    }
    const double lon = column_longitude(col, w);
    const double rho = h / std::tan(std::abs(lat));
    const Eigen::Vector3d cam(rho * std::sin(lon), sign * h, rho * std::cos(lon));
    out.points.push_back(pose.to_world(cam));
  }
  return out;
}

std::vector<SphericalSample> world_to_boundary_samples(const WorldPolyline& poly,
                                                       const CameraPose& pose) {
  std::vector<SphericalSample> out;
  out.reserve(poly.points.size());
  for (std::size_t i = 0; i < poly.points.size(); ++i) {
    const Eigen::Vector3d q = pose.to_camera(poly.points[i]);
    const double horizontal = std::hypot(q.x(), q.z());
    if (q.norm() <= 1e-9) {
      std::ostringstream os;
      os << "polyline point " << i << " coincides with the camera center";
      throw DegenerateGeometryError(os.str());
    }
    // atan2 form of asin(-y/|q|); identical in exact arithmetic, better conditioned near the poles.
    out.push_back({std::atan2(q.x(), q.z()), std::atan2(-q.y(), horizontal)});
  }
  return out;
}

double ceiling_height(const SphericalBoundary& floor, const SphericalBoundary& ceiling,
                      double floor_height) {
  if (floor.kind() != BoundaryKind::Floor || ceiling.kind() != BoundaryKind::Ceiling)
    throw ArgumentError("ceiling_height expects a floor and a ceiling boundary");
  if (floor.width() != ceiling.width())
    throw ArgumentError("floor and ceiling boundaries differ in width");
  if (!(floor_height > 0.0)) throw ArgumentError("floor height must be positive");

  // Neumaier-compensated sum; the terms are nearly equal and a plain running
  // sum drifts by tens of ulps at panorama widths.
  double sum = 0.0, comp = 0.0;
  for (std::size_t col = 0; col < floor.width(); ++col) {
    const double term = -floor_height / std::tan(floor[col]) * std::tan(ceiling[col]);
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  const double h = (sum + comp) / static_cast<double>(floor.width());
  if (!(h > 0.0) || !std::isfinite(h)) {
    std::ostringstream os;
    os << "floor and ceiling boundaries imply a non-positive ceiling height " << h;
    throw InconsistentBoundariesError(os.str());
  }
  return h;
}

}  // namespace mlc
