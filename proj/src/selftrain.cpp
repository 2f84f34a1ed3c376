#include "mlc/selftrain.hpp"

#include "mlc/error.hpp"
#include "mlc/evaluation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

namespace mlc {

const char* to_string(LossKind k) { return k == LossKind::Wbc ? "wbc" : "l1"; }

LossKind parse_loss(const std::string& s) {
  if (s == "wbc") return LossKind::Wbc;
  if (s == "l1") return LossKind::L1;
  throw ArgumentError("unknown loss '" + s + "' (expected wbc or l1)");
}

void TrainConfig::validate() const {
  if (!(damping > 0.0 && damping <= 1.0)) throw ArgumentError("damping must be in (0, 1]");
  if (!(sigma_floor > 0.0)) throw ArgumentError("sigma_floor must be positive");
  if (!(view_fraction > 0.0 && view_fraction <= 1.0))
    throw ArgumentError("view fraction must be in (0, 1]");
  if (eval_every == 0) throw ArgumentError("eval_every must be at least 1");
  if (grid < 2) throw ArgumentError("grid must be at least 2x2");
}

namespace detail {

std::vector<double> consensus_update(std::span<const double> lat, const PseudoLabel& pl,
                                     double damping, LossKind loss) {
  const std::size_t w = lat.size();
  double sigma_ref = 0.0;
  if (loss == LossKind::Wbc) {
    std::vector<double> s(pl.sigma);
    std::nth_element(s.begin(), s.begin() + static_cast<long>((w - 1) / 2), s.end());
    sigma_ref = s[(w - 1) / 2];
  }
  std::vector<double> out(w);
  for (std::size_t c = 0; c < w; ++c) {
    double step = damping;
    if (loss == LossKind::Wbc) {
      const double ratio = (sigma_ref * sigma_ref) / (pl.sigma[c] * pl.sigma[c]);
      step *= std::min(1.0, ratio);
    }
    const double lo = std::min(lat[c], pl.lat_bar[c]);
    const double hi = std::max(lat[c], pl.lat_bar[c]);
    out[c] = std::clamp((1.0 - step) * lat[c] + step * pl.lat_bar[c], lo, hi);
  }
  return out;
}

ViewUpdate update_view(const std::vector<ViewFrame>& frames, std::size_t target,
                       const TrainConfig& cfg) {
  const auto views = select_views(frames.size(), cfg.view_fraction, target, cfg.seed);
  const ViewFrame& f = frames[target];

  auto refine = [&](BoundaryKind kind, const SphericalBoundary& current, double& wbc, double& l1) {
    const auto stack = build_stack(frames, target, kind, views, cfg.resample);
    const PseudoLabel pl = fuse(stack, cfg.estimator, cfg.sigma_floor);
    wbc += wbc_loss(current, pl);
    l1 += l1_loss(current, pl);
    return SphericalBoundary(consensus_update(current.lat(), pl, cfg.damping, cfg.loss), kind);
  };

  double wbc = 0.0, l1 = 0.0;
  SphericalBoundary floor = refine(BoundaryKind::Floor, f.floor, wbc, l1);
  std::optional<SphericalBoundary> ceiling;
  const bool all_ceilings =
      std::all_of(frames.begin(), frames.end(), [](const ViewFrame& v) { return v.ceiling.has_value(); });
  if (f.ceiling) {
    ceiling = all_ceilings ? refine(BoundaryKind::Ceiling, *f.ceiling, wbc, l1) : *f.ceiling;
  }
  return {std::move(floor), std::move(ceiling), wbc, l1};
}

}  // namespace detail

StepResult self_train_step(const std::vector<ViewFrame>& frames, const TrainConfig& cfg) {
  cfg.validate();
  if (frames.empty()) throw ArgumentError("scene has no frames");
  const auto n = static_cast<long>(frames.size());
  std::vector<std::optional<detail::ViewUpdate>> updates(frames.size());
  std::vector<std::exception_ptr> errors(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < n; ++j) {
    const auto i = static_cast<std::size_t>(j);
    try {
      updates[i] = detail::update_view(frames, i, cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  StepResult out;
  out.frames = frames;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    out.frames[i].floor = std::move(updates[i]->floor);
    out.frames[i].ceiling = std::move(updates[i]->ceiling);
    out.mean_wbc += updates[i]->wbc;
    out.mean_l1 += updates[i]->l1;
  }
  out.mean_wbc /= static_cast<double>(frames.size());
  out.mean_l1 /= static_cast<double>(frames.size());
  return out;
}

double scene_entropy(const std::vector<ViewFrame>& frames, const GridSpec& grid, bool floor_only) {
  const auto polylines = scene_polylines(frames, floor_only);
  return mlc_entropy(density_map(polylines, grid));
}

TrainResult run(const Scene& scene, const TrainConfig& cfg) {
  cfg.validate();
  scene.validate();

  TrainResult result;
  TrainTrajectory& traj = result.trajectory;
  {
    const auto polylines = scene_polylines(scene.frames, cfg.floor_only_metric);
    traj.grid = grid_for(polylines, cfg.grid, cfg.grid, cfg.padding);
  }

  std::vector<ViewFrame> current = scene.frames;
  std::optional<double> best_h;
  for (std::size_t it = 0; it <= cfg.max_iters; ++it) {
    IterationRecord rec;
    rec.iter = it;
    if (it % cfg.eval_every == 0) {
      rec.h_mlc = scene_entropy(current, traj.grid, cfg.floor_only_metric);
      if (scene.ground_truth) {
        // Far outlier columns can leave the raster too coarse to see either
        // polygon; the IoU is then undefined and left out of the record.
        try {
          const auto rep = evaluate(current, *scene.ground_truth, {cfg.iou_raster, false});
          rec.iou2d = rep.iou2d;
          rec.iou3d = rep.iou3d;
        } catch (const DegenerateGeometryError&) {
        }
      }
      if (!best_h || *rec.h_mlc < *best_h) {
        best_h = rec.h_mlc;
        traj.best_iter = it;
        result.best_frames = current;
      }
    }
    StepResult step = self_train_step(current, cfg);
    rec.wbc = step.mean_wbc;
    rec.l1 = step.mean_l1;
    traj.records.push_back(rec);
    if (it < cfg.max_iters) current = std::move(step.frames);
  }
  return result;
}

}  // namespace mlc
