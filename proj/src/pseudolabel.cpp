#include "mlc/pseudolabel.hpp"

#include "mlc/error.hpp"
#include "mlc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mlc {

const char* to_string(Estimator e) { return e == Estimator::Median ? "median" : "mean"; }

Estimator parse_estimator(const std::string& s) {
  if (s == "median") return Estimator::Median;
  if (s == "mean") return Estimator::Mean;
  throw ArgumentError("unknown estimator '" + s + "' (expected median or mean)");
}

namespace detail {

void check_fuse_args(const BoundaryStack& stack, double sigma_floor) {
  if (!(sigma_floor > 0.0)) throw ArgumentError("sigma_floor must be positive");
  if (stack.lat.rows() != stack.valid.rows() || stack.lat.cols() != stack.valid.cols())
    throw ArgumentError("stack latitude and mask shapes differ");
}

void fuse_column(const BoundaryStack& stack, Eigen::Index row, Estimator estimator,
                 double sigma_floor, std::vector<double>& scratch, PseudoLabel& out) {
  scratch.clear();
  for (Eigen::Index s = 0; s < stack.lat.cols(); ++s)
    if (stack.valid(row, s)) scratch.push_back(stack.lat(row, s));
  const auto r = static_cast<std::size_t>(row);
  if (scratch.empty()) {
    std::ostringstream os;
    os << "stack column " << row << " has no valid entries";
    throw InsufficientCoverageError(os.str(), {r});
  }
  // Sort so that the sums below are independent of source order.
  std::sort(scratch.begin(), scratch.end());
  const double k = static_cast<double>(scratch.size());
  const double mean = std::accumulate(scratch.begin(), scratch.end(), 0.0) / k;
  double var = 0.0;
  for (double v : scratch) var += (v - mean) * (v - mean);
  var /= k;

  out.lat_bar[r] = estimator == Estimator::Median ? scratch[(scratch.size() - 1) / 2] : mean;
  out.sigma[r] = std::max(std::sqrt(var), sigma_floor);
  out.support[r] = scratch.size();
}

}  // namespace detail

PseudoLabel fuse(const BoundaryStack& stack, Estimator estimator, double sigma_floor) {
  detail::check_fuse_args(stack, sigma_floor);
  const std::size_t w = stack.width();
  PseudoLabel out;
  out.lat_bar.assign(w, 0.0);
  out.sigma.assign(w, 0.0);
  out.support.assign(w, 0);

  const auto rows = static_cast<long>(w);
  std::vector<std::exception_ptr> errors(w);
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (long r = 0; r < rows; ++r) {
      try {
        detail::fuse_column(stack, r, estimator, sigma_floor, scratch, out);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {
void check_widths(std::size_t pred, const PseudoLabel& pl) {
  if (pred != pl.lat_bar.size() || pred != pl.sigma.size()) {
    std::ostringstream os;
    os << "prediction has " << pred << " columns but pseudo-label has " << pl.lat_bar.size();
    throw ArgumentError(os.str());
  }
}
}  // namespace

double wbc_loss(std::span<const double> pred, const PseudoLabel& pl) {
  check_widths(pred.size(), pl);
  double sum = 0.0;
  for (std::size_t c = 0; c < pred.size(); ++c)
    sum += std::abs(pred[c] - pl.lat_bar[c]) / (pl.sigma[c] * pl.sigma[c]);
  return sum;
}

double wbc_loss(const SphericalBoundary& pred, const PseudoLabel& pl) {
  return wbc_loss(pred.lat(), pl);
}

double l1_loss(std::span<const double> pred, const PseudoLabel& pl) {
  check_widths(pred.size(), pl);
  double sum = 0.0;
  for (std::size_t c = 0; c < pred.size(); ++c) sum += std::abs(pred[c] - pl.lat_bar[c]);
  return sum;
}

double l1_loss(const SphericalBoundary& pred, const PseudoLabel& pl) {
  return l1_loss(pred.lat(), pl);
}

std::vector<std::size_t> select_views(std::size_t n_views, double fraction, std::size_t target,
                                      std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ArgumentError("view fraction must be in (0, 1]");
  if (target >= n_views) throw ArgumentError("target view index out of range");
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n_views))), 1, n_views);

  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < n_views; ++i)
    if (i != target) others.push_back(i);
  SplitMix64 rng = SplitMix64(seed).split(target);
  // Partial Fisher-Yates: the first k-1 entries become the draw.
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(others.size() - i));
    std::swap(others[i], others[j]);
  }
  std::vector<std::size_t> out(others.begin(), others.begin() + static_cast<long>(k - 1));
  out.push_back(target);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FramePseudoLabel> scene_pseudo_labels(const Scene& scene,
                                                  const PseudoLabelOptions& opts) {
  std::vector<FramePseudoLabel> out;
  out.reserve(scene.size());
  for (std::size_t j = 0; j < scene.size(); ++j) {
    const auto views = select_views(scene.size(), opts.view_fraction, j, opts.seed);
    const auto stack = build_stack(scene, j, opts.kind, views, opts.resample);
    out.push_back({scene.frames[j].id, opts.kind, fuse(stack, opts.estimator, opts.sigma_floor)});
  }
  return out;
}

}  // namespace mlc
