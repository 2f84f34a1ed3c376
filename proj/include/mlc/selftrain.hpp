#pragma once

// Consensus refinement: each iteration re-fuses pseudo-labels from the current
// boundaries and moves every view's boundary a damped step towards its own
// pseudo-label. The entropy score picks the snapshot to keep.

#include "mlc/consistency.hpp"
#include "mlc/pseudolabel.hpp"
#include "mlc/reprojection.hpp"
#include "mlc/scene.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mlc {

enum class LossKind { Wbc, L1 };

const char* to_string(LossKind k);
LossKind parse_loss(const std::string& s);

struct TrainConfig {
  std::size_t max_iters = 20;
  double damping = 0.5;  // lambda in (0, 1]
  Estimator estimator = Estimator::Median;
  LossKind loss = LossKind::Wbc;
  double sigma_floor = kDefaultSigmaFloor;
  double view_fraction = 1.0;
  std::size_t eval_every = 1;
  std::uint64_t seed = 0;  // view subsampling

  bool floor_only_metric = false;
  std::size_t grid = kDefaultGridSize;
  double padding = kDefaultGridPadding;
  std::size_t iou_raster = 512;
  ResampleOptions resample;

  void validate() const;
};

struct IterationRecord {
  std::size_t iter = 0;
  std::optional<double> h_mlc;
  double wbc = 0.0;  // mean over views (floor and ceiling summed per view)
  double l1 = 0.0;
  std::optional<double> iou2d;
  std::optional<double> iou3d;
};

struct TrainTrajectory {
  std::vector<IterationRecord> records;
  std::size_t best_iter = 0;
  GridSpec grid;
};

struct StepResult {
  std::vector<ViewFrame> frames;
  double mean_wbc = 0.0;
  double mean_l1 = 0.0;
};

// One refinement step over all views. Losses describe the input boundaries.
StepResult self_train_step(const std::vector<ViewFrame>& frames, const TrainConfig& cfg);

struct TrainResult {
  TrainTrajectory trajectory;
  std::vector<ViewFrame> best_frames;
};

TrainResult run(const Scene& scene, const TrainConfig& cfg);

// Entropy of the frames' polylines on a fixed grid.
double scene_entropy(const std::vector<ViewFrame>& frames, const GridSpec& grid,
                     bool floor_only = false);

namespace detail {

struct ViewUpdate {
  SphericalBoundary floor;
  std::optional<SphericalBoundary> ceiling;
  double wbc = 0.0;
  double l1 = 0.0;
};

ViewUpdate update_view(const std::vector<ViewFrame>& frames, std::size_t target,
                       const TrainConfig& cfg);

// Damped, optionally uncertainty-weighted move of `lat` towards the pseudo-label.
std::vector<double> consensus_update(std::span<const double> lat, const PseudoLabel& pl,
                                     double damping, LossKind loss);

}  // namespace detail

}  // namespace mlc
