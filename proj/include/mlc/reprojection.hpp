#pragma once

#include "mlc/geometry.hpp"
#include "mlc/scene.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace mlc {

using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Re-projected boundaries of several views expressed in one target view.
// Row = target column, column = contributing view (in `sources` order).
struct BoundaryStack {
  std::size_t target_view = 0;
  BoundaryKind kind = BoundaryKind::Floor;
  Eigen::MatrixXd lat;
  MaskMatrix valid;
  std::vector<std::size_t> sources;
  // Target columns where a source curve folded back over itself.
  std::size_t multivalued_columns = 0;

  std::size_t width() const { return static_cast<std::size_t>(lat.rows()); }
  std::size_t views() const { return static_cast<std::size_t>(lat.cols()); }
};

enum class Interpolation {
  // Linear in latitude along longitude.
  Linear,
  // Along the great circle through the two bracketing bearings. Exact for
  // straight wall segments; corners are rebuilt from the neighbouring walls
  // when both sides are sampled straight lines.
  GreatCircle,
};

struct ResampleOptions {
  // Maximum longitude gap bridged by interpolation; <= 0 selects 4 * 2*pi / W.
  double gap_max = 0.0;
  Interpolation method = Interpolation::GreatCircle;
  double lat_min = kDefaultLatMin;
};

struct ResampledColumns {
  std::vector<double> lat;
  std::vector<std::uint8_t> valid;
  std::size_t multivalued_columns = 0;
};

// Boundary of `src` as seen from `dst_pose`: one sample per source column, in
// source column order.
std::vector<SphericalSample> reproject_boundary(const SphericalBoundary& src,
                                                const CameraPose& src_pose,
                                                const CameraPose& dst_pose);

// Bins a closed, ordered curve of samples onto `width` column centers. Sample k
// is taken to come from source column k of a panorama `samples.size()` wide;
// that longitude breaks ties when the curve covers a column more than once.
ResampledColumns resample_to_columns(std::span<const SphericalSample> samples,
                                     std::size_t width, BoundaryKind kind,
                                     const ResampleOptions& opts = {});

// Stack of every source view's boundary re-projected into `target`. An empty
// `sources` means all frames. Throws InsufficientCoverageError if a column
// ends up with no valid entry.
BoundaryStack build_stack(const std::vector<ViewFrame>& frames, std::size_t target,
                          BoundaryKind kind, std::span<const std::size_t> sources = {},
                          const ResampleOptions& opts = {});

inline BoundaryStack build_stack(const Scene& scene, std::size_t target, BoundaryKind kind,
                                 std::span<const std::size_t> sources = {},
                                 const ResampleOptions& opts = {}) {
  return build_stack(scene.frames, target, kind, sources, opts);
}

namespace detail {

// Re-projects and resamples one source into one stack column.
ResampledColumns stack_column(const std::vector<ViewFrame>& frames, std::size_t target,
                              std::size_t source, BoundaryKind kind,
                              const ResampleOptions& opts);

std::vector<std::size_t> resolve_sources(std::size_t n_frames, std::size_t target,
                                         std::span<const std::size_t> sources);

// Fills the stack from per-source columns and applies the coverage check.
BoundaryStack assemble_stack(std::size_t target, BoundaryKind kind,
                             std::vector<std::size_t> sources,
                             const std::vector<ResampledColumns>& columns, std::size_t width);

}  // namespace detail

}  // namespace mlc
