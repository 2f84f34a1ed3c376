#pragma once

#include "mlc/reprojection.hpp"
#include "mlc/scene.hpp"

#include <cstdint>
#include <vector>

namespace mlc {

enum class Estimator { Median, Mean };

const char* to_string(Estimator e);
Estimator parse_estimator(const std::string& s);

inline constexpr double kDefaultSigmaFloor = 1e-3;

// Per-column fusion over the valid entries of a stack: lower median (or mean),
// population standard deviation clamped below by sigma_floor, and support.
PseudoLabel fuse(const BoundaryStack& stack, Estimator estimator,
                 double sigma_floor = kDefaultSigmaFloor);

// sum |pred - lat_bar| / sigma^2 over columns.
double wbc_loss(const SphericalBoundary& pred, const PseudoLabel& pl);
double wbc_loss(std::span<const double> pred, const PseudoLabel& pl);

// sum |pred - lat_bar| over columns.
double l1_loss(const SphericalBoundary& pred, const PseudoLabel& pl);
double l1_loss(std::span<const double> pred, const PseudoLabel& pl);

// Views contributing to `target`'s stack when only a fraction of the scene is
// used. The target is always included; the rest is a seeded draw without
// replacement. Result is sorted.
std::vector<std::size_t> select_views(std::size_t n_views, double fraction, std::size_t target,
                                      std::uint64_t seed);

struct PseudoLabelOptions {
  BoundaryKind kind = BoundaryKind::Floor;
  Estimator estimator = Estimator::Median;
  double sigma_floor = kDefaultSigmaFloor;
  double view_fraction = 1.0;
  std::uint64_t seed = 0;
  ResampleOptions resample;
};

// Pseudo-label for every frame of the scene, in frame order.
std::vector<FramePseudoLabel> scene_pseudo_labels(const Scene& scene,
                                                  const PseudoLabelOptions& opts = {});

namespace detail {
void fuse_column(const BoundaryStack& stack, Eigen::Index row, Estimator estimator,
                 double sigma_floor, std::vector<double>& scratch, PseudoLabel& out);
void check_fuse_args(const BoundaryStack& stack, double sigma_floor);
}  // namespace detail

}  // namespace mlc
