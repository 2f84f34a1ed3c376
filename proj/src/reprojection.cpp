#include "mlc/reprojection.hpp"

#include "mlc/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

namespace mlc {

using std::numbers::pi;

std::vector<SphericalSample> reproject_boundary(const SphericalBoundary& src,
                                                const CameraPose& src_pose,
                                                const CameraPose& dst_pose) {
  return world_to_boundary_samples(boundary_to_world(src, src_pose), dst_pose);
}

namespace {

constexpr double kLineTol = 1e-10;   // bearing residual off a great circle for "same wall"
constexpr double kKinkTol = 1e-9;    // residual that marks a change of wall
constexpr double kConditionTol = 1e-9;

// Latitude where the great circle with normal n crosses longitude lon.
// Returns false when the circle is (nearly) a meridian or the horizon is undefined.
bool great_circle_latitude(const Eigen::Vector3d& n, double lon, double& lat) {
  const double norm = n.norm();
  if (!(norm > 0.0) || std::abs(n.y()) < kConditionTol * norm) return false;
  lat = std::atan((n.x() * std::sin(lon) + n.z() * std::cos(lon)) / n.y());
  return std::isfinite(lat);
}

double residual(const Eigen::Vector3d& unit_normal, const Eigen::Vector3d& q) {
  return std::abs(unit_normal.dot(q));
}

struct Candidate {
  double lat = 0.0;
  double source_distance = std::numeric_limits<double>::infinity();
  int count = 0;
};

}  // namespace

ResampledColumns resample_to_columns(std::span<const SphericalSample> samples,
                                     std::size_t width, BoundaryKind kind,
                                     const ResampleOptions& opts) {
  const std::size_t n = samples.size();
  if (n < 2) throw ArgumentError("resampling needs at least two samples");
  if (width == 0) throw ArgumentError("resampling needs a positive column count");

  const double step = 2.0 * pi / static_cast<double>(width);
  const double gap_max = opts.gap_max > 0.0 ? opts.gap_max : 4.0 * step;

  std::vector<Eigen::Vector3d> q(n);
  for (std::size_t k = 0; k < n; ++k) q[k] = bearing(samples[k].lon, samples[k].lat);
  auto at = [&](std::ptrdiff_t k) -> const Eigen::Vector3d& {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return q[static_cast<std::size_t>(((k % m) + m) % m)];
  };

  std::vector<Candidate> cand(width);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t b = (k + 1) % n;
    const SphericalSample& sa = samples[k];
    const SphericalSample& sb = samples[b];
    const double delta = wrap_angle(sb.lon - sa.lon);
    if (delta == 0.0 || std::abs(delta) > gap_max) continue;

    // Great-circle setup for this segment, with an optional rebuilt corner.
    bool use_gc = opts.method == Interpolation::GreatCircle && std::abs(delta) < pi / 2;
    Eigen::Vector3d n_seg = q[k].cross(q[b]);
    bool corner = false;
    double corner_offset = 0.0;
    Eigen::Vector3d n_before, n_after;
    if (use_gc && n >= 6) {
      const auto kk = static_cast<std::ptrdiff_t>(k);
      n_before = at(kk - 1).cross(at(kk));
      n_after = at(kk + 1).cross(at(kk + 2));
      if (n_before.norm() > 0.0 && n_after.norm() > 0.0) {
        const Eigen::Vector3d ub = n_before.normalized();
        const Eigen::Vector3d ua = n_after.normalized();
        const bool straight_before = residual(ub, at(kk - 2)) <= kLineTol;
        const bool straight_after = residual(ua, at(kk + 3)) <= kLineTol;
        const bool kink = residual(ub, at(kk + 1)) > kKinkTol && residual(ua, at(kk)) > kKinkTol;
        if (straight_before && straight_after && kink && ub.cross(ua).norm() > 1e-6) {
          Eigen::Vector3d c = ub.cross(ua).normalized();
          if (c.dot(q[k] + q[b]) < 0.0) c = -c;
          const double off = wrap_angle(std::atan2(c.x(), c.z()) - sa.lon);
          if ((delta > 0.0 && off > 0.0 && off < delta) ||
              (delta < 0.0 && off < 0.0 && off > delta)) {
            corner = true;
            corner_offset = off;
          }
        }
      }
    }

    const double src_lon_a = column_longitude(k, n);
    const double src_delta = wrap_angle(column_longitude(b, n) - src_lon_a);

    // Candidate column range, padded by one on each side; the exact offset test decides.
    const double lo = std::min(sa.lon, sa.lon + delta);
    const double hi = std::max(sa.lon, sa.lon + delta);
    const auto c_lo = static_cast<long>(std::floor((lo + pi) / step - 0.5)) - 1;
    const auto c_hi = static_cast<long>(std::ceil((hi + pi) / step - 0.5)) + 1;
    for (long ci = c_lo; ci <= c_hi; ++ci) {
      const auto w = static_cast<long>(width);
      const auto col = static_cast<std::size_t>(((ci % w) + w) % w);
      const double lon_c = column_longitude(col, width);
      const double off = wrap_angle(lon_c - sa.lon);
      // The end test uses the same difference the next segment uses for its start,
      // so a column on a knot belongs to exactly one segment.
      const double off_end = wrap_angle(lon_c - sb.lon);
      const bool inside = delta > 0.0 ? (off >= 0.0 && off_end < 0.0 && off < pi)
                                      : (off <= 0.0 && off_end > 0.0 && off > -pi);
      if (!inside) continue;
      const double t = std::clamp(off / delta, 0.0, 1.0);

      double lat = sa.lat + t * (sb.lat - sa.lat);
      if (use_gc && off != 0.0) {
        const Eigen::Vector3d& normal =
            corner ? (std::abs(off) <= std::abs(corner_offset) ? n_before : n_after) : n_seg;
        double gc_lat;
        if (great_circle_latitude(normal, lon_c, gc_lat)) lat = gc_lat;
      }

      const double src_lon = src_lon_a + t * src_delta;
      const double dist = std::abs(wrap_angle(src_lon - lon_c));
      Candidate& cd = cand[col];
      ++cd.count;
      if (dist < cd.source_distance) {
        cd.source_distance = dist;
        cd.lat = lat;
      }
    }
  }

  ResampledColumns out;
  out.lat.assign(width, 0.0);
  out.valid.assign(width, 0);
  for (std::size_t col = 0; col < width; ++col) {
    const Candidate& cd = cand[col];
    if (cd.count == 0) continue;
    if (cd.count > 1) ++out.multivalued_columns;
    const double v = cd.lat;
    const bool side_ok = kind == BoundaryKind::Floor ? (v <= -opts.lat_min && v > -pi / 2)
                                                     : (v >= opts.lat_min && v < pi / 2);
    if (std::isfinite(v) && side_ok) {
      out.lat[col] = v;
      out.valid[col] = 1;
    }
  }
  return out;
}

namespace detail {

ResampledColumns stack_column(const std::vector<ViewFrame>& frames, std::size_t target,
                              std::size_t source, BoundaryKind kind,
                              const ResampleOptions& opts) {
  const ViewFrame& src = frames[source];
  const CameraPose src_pose =
      kind == BoundaryKind::Ceiling ? resolve_ceiling_height(src) : src.pose;
  const auto samples = reproject_boundary(src.boundary(kind), src_pose, frames[target].pose);
  return resample_to_columns(samples, frames[target].boundary(kind).width(), kind, opts);
}

std::vector<std::size_t> resolve_sources(std::size_t n_frames, std::size_t target,
                                         std::span<const std::size_t> sources) {
  if (n_frames == 0) throw ArgumentError("scene has no frames");
  if (target >= n_frames) throw ArgumentError("target view index out of range");
  std::vector<std::size_t> out;
  if (sources.empty()) {
    out.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) out[i] = i;
  } else {
    out.assign(sources.begin(), sources.end());
    for (std::size_t s : out)
      if (s >= n_frames) throw ArgumentError("source view index out of range");
  }
  return out;
}

BoundaryStack assemble_stack(std::size_t target, BoundaryKind kind,
                             std::vector<std::size_t> sources,
                             const std::vector<ResampledColumns>& columns, std::size_t width) {
  BoundaryStack stack;
  stack.target_view = target;
  stack.kind = kind;
  const auto w = static_cast<Eigen::Index>(width);
  const auto m = static_cast<Eigen::Index>(sources.size());
  stack.lat = Eigen::MatrixXd::Zero(w, m);
  stack.valid = MaskMatrix::Constant(w, m, false);
  for (Eigen::Index s = 0; s < m; ++s) {
    const auto& col = columns[static_cast<std::size_t>(s)];
    stack.multivalued_columns += col.multivalued_columns;
    for (Eigen::Index r = 0; r < w; ++r) {
      stack.lat(r, s) = col.lat[static_cast<std::size_t>(r)];
      stack.valid(r, s) = col.valid[static_cast<std::size_t>(r)] != 0;
    }
  }
  stack.sources = std::move(sources);

  std::vector<std::size_t> empty;
  for (Eigen::Index r = 0; r < w; ++r)
    if (!stack.valid.row(r).any()) empty.push_back(static_cast<std::size_t>(r));
  if (!empty.empty()) {
    std::ostringstream os;
    os << empty.size() << " target column(s) have no valid re-projection:";
    for (std::size_t i = 0; i < std::min<std::size_t>(empty.size(), 16); ++i) os << ' ' << empty[i];
    if (empty.size() > 16) os << " ...";
    throw InsufficientCoverageError(os.str(), std::move(empty));
  }
  return stack;
}

}  // namespace detail

BoundaryStack build_stack(const std::vector<ViewFrame>& frames, std::size_t target,
                          BoundaryKind kind, std::span<const std::size_t> sources,
                          const ResampleOptions& opts) {
  auto src = detail::resolve_sources(frames.size(), target, sources);
  const std::size_t width = frames[target].boundary(kind).width();
  const auto m = static_cast<long>(src.size());

  std::vector<ResampledColumns> columns(src.size());
  std::vector<std::exception_ptr> errors(src.size());
#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < m; ++s) {
    const auto i = static_cast<std::size_t>(s);
    try {
      columns[i] = detail::stack_column(frames, target, src[i], kind, opts);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  return detail::assemble_stack(target, kind, std::move(src), columns, width);
}

}  // namespace mlc
