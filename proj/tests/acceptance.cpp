// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include "mlc/consistency.hpp"
#include "mlc/evaluation.hpp"
#include "mlc/geometry.hpp"
#include "mlc/pseudolabel.hpp"
#include "mlc/reprojection.hpp"
#include "mlc/rng.hpp"
#include "mlc/selftrain.hpp"
#include "mlc/synth.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace mlc;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<oracle::Pt> to_oracle(const Polygon2& p) {
  std::vector<oracle::Pt> out;
  for (const auto& q : p) out.push_back({q.x(), q.y()});
  return out;
}

Scene with_noise(const Scene& clean, double boundary_std, std::uint64_t seed, double pose_trans = 0.0) {
  NoiseSpec n;
  n.boundary_std = boundary_std;
  n.pose_trans_std = pose_trans;
  n.seed = seed;
  return perturb(clean, n);
}

// Mean |lat_bar - truth| over all floor columns of every frame.
double pseudo_label_error(const Scene& noisy, const std::vector<ViewFrame>& truth, Estimator e,
                          double view_fraction = 1.0, std::uint64_t seed = 0) {
  PseudoLabelOptions o;
  o.estimator = e;
  o.view_fraction = view_fraction;
  o.seed = seed;
  const auto pls = scene_pseudo_labels(noisy, o);
  double s = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < pls.size(); ++i)
    for (std::size_t c = 0; c < truth[i].floor.width(); ++c, ++k)
      s += std::abs(pls[i].label.lat_bar[c] - truth[i].floor[c]);
  return s / static_cast<double>(k);
}

// ---------------------------------------------------------------------------

Outcome projection_round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  SplitMix64 rng(20240601);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t w = 8 + static_cast<std::size_t>(rng.below(505));
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    const Eigen::Vector3d t(rng.uniform(-5, 5), rng.uniform(-1, 1), rng.uniform(-5, 5));
    const double hf = rng.uniform(1.0, 2.0);
    const double hc = rng.uniform(0.5, 1.5);
    const CameraPose pose = CameraPose(q.toRotationMatrix(), t, hf).with_ceiling_height(hc);
    const bool ceiling = trial % 2 == 1;
    std::vector<double> lat(w);
    for (double& v : lat) v = (ceiling ? 1.0 : -1.0) * rng.uniform(0.01, pi / 2 - 0.05);
    const SphericalBoundary b(lat, ceiling ? BoundaryKind::Ceiling : BoundaryKind::Floor);
    const auto back = world_to_boundary_samples(boundary_to_world(b, pose), pose);
    for (std::size_t c = 0; c < w; ++c) {
      worst = std::max(worst, std::abs(wrap_angle(back[c].lon - column_longitude(c, w))));
      worst = std::max(worst, std::abs(back[c].lat - lat[c]));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-9 && secs < 5.0, fmt("max angle error %.3g rad, %.2f s", worst, secs)};
}

Outcome oracle_equivalence() {
  std::vector<RoomSpec> rooms;
  for (int i = 0; i < 7; ++i) rooms.push_back(square_room(3.0 + 0.6 * i, 1.3 + 0.05 * i, 0.9 + 0.1 * i));
  for (int i = 0; i < 7; ++i) rooms.push_back(ngon_room(5 + static_cast<std::size_t>(i), 2.0 + 0.3 * i, 1.5, 1.0 + 0.05 * i));
  for (int i = 0; i < 6; ++i) rooms.push_back(lshape_room(5.0 + 0.5 * i, 1.4 + 0.05 * i, 1.2));
  double wall = 0.0, height = 0.0;
  std::uint64_t seed = 0;
  for (const auto& room : rooms) {
    const auto fp = to_oracle(room.footprint);
    const auto scene = generate_scene(room, 3, 256, 1000 + seed++);
    for (const auto& f : scene.frames) {
      for (const auto& p : boundary_to_world(f.floor, f.pose).points)
        wall = std::max(wall, oracle::wall_distance(fp, {p.x(), p.z()}));
      const auto cpose = f.pose.with_ceiling_height(room.h_ceil);
      for (const auto& p : boundary_to_world(*f.ceiling, cpose).points)
        wall = std::max(wall, oracle::wall_distance(fp, {p.x(), p.z()}));
      height = std::max(height, std::abs(ceiling_height(f.floor, *f.ceiling, room.h_floor) - room.h_ceil));
    }
  }
  return {wall <= 1e-9 && height <= 1e-9,
          fmt("%zu rooms, max wall distance %.3g m, max ceiling height error %.3g m", rooms.size(), wall, height)};
}

Outcome noise_free_consistency() {
  double spread = 0.0, fuse_err = 0.0, wbc = 0.0;
  std::uint64_t seed = 0;
  for (const auto& room : {square_room(4.0), ngon_room(6, 3.0), lshape_room(6.0)})
    for (int rep = 0; rep < 3; ++rep) {
      const auto scene = generate_scene(room, 5, 256, 2000 + seed++);
      for (std::size_t t = 0; t < scene.size(); ++t)
        for (auto kind : {BoundaryKind::Floor, BoundaryKind::Ceiling}) {
          const auto stack = build_stack(scene, t, kind);
          for (Eigen::Index r = 0; r < stack.lat.rows(); ++r) {
            double lo = 1e9, hi = -1e9;
            for (Eigen::Index c = 0; c < stack.lat.cols(); ++c)
              if (stack.valid(r, c)) {
                lo = std::min(lo, stack.lat(r, c));
                hi = std::max(hi, stack.lat(r, c));
              }
            spread = std::max(spread, hi - lo);
          }
          const auto pl = fuse(stack, Estimator::Median, 1e-3);
          const auto& truth = (*scene.ground_truth)[t].boundary(kind);
          for (std::size_t c = 0; c < truth.width(); ++c)
            fuse_err = std::max(fuse_err, std::abs(pl.lat_bar[c] - truth[c]));
          wbc = std::max(wbc, wbc_loss(truth, pl));
        }
    }
  return {spread < 1e-6 && fuse_err <= 1e-6 && wbc < 1e-6,
          fmt("max spread %.3g rad, max fuse error %.3g rad, max wbc %.3g", spread, fuse_err, wbc)};
}

Outcome median_robustness() {
  int wins = 0;
  std::string d;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto clean = generate_scene(square_room(5.0), 10, 256, 3000 + seed);
    auto noisy = with_noise(clean, 0.01, seed);
    NoiseSpec o;
    o.boundary_std = 0.3;
    o.seed = 100 + seed;
    const auto outliers = perturb(clean, o);
    // Two of ten views (20%) replaced by outlier views.
    const auto picked = select_views(10, 0.2, static_cast<std::size_t>(seed % 10), seed);
    for (auto i : picked) noisy.frames[i] = outliers.frames[i];
    const double med = pseudo_label_error(noisy, *clean.ground_truth, Estimator::Median);
    const double mean = pseudo_label_error(noisy, *clean.ground_truth, Estimator::Mean);
    wins += med < mean;
    if (seed == 0) d = fmt("seed 0: median %.4f vs mean %.4f rad", med, mean);
  }
  return {wins >= 9, fmt("median better in %d/10 seeds; %s", wins, d.c_str())};
}

Outcome view_count_monotonicity() {
  const std::vector<double> fractions{1.0, 0.5, 0.1};
  std::vector<double> err(3, 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto clean = generate_scene(square_room(5.0), 20, 128, 4000 + seed);
    const auto noisy = with_noise(clean, 0.02, seed);
    for (std::size_t k = 0; k < 3; ++k)
      err[k] += pseudo_label_error(noisy, *clean.ground_truth, Estimator::Median, fractions[k], seed) / 10.0;
  }
  return {err[0] < err[1] && err[1] < err[2],
          fmt("mean error %.5f (100%%) < %.5f (50%%) < %.5f (10%%) rad", err[0], err[1], err[2])};
}

Outcome entropy_metric() {
  WorldPolyline one;
  one.points.emplace_back(0.2, 1.6, -0.3);
  const double h1 = mlc_entropy(density_map(std::vector<WorldPolyline>{one}, 64, 64));

  bool exact = true;
  for (std::size_t k : {2u, 5u, 7u, 49u, 97u, 256u}) {
    WorldPolyline pl;
    for (std::size_t i = 0; i < k; ++i) pl.points.emplace_back(static_cast<double>(i), 1.6, 0.0);
    GridSpec spec;
    spec.origin = Eigen::Vector2d(-0.5, -0.5);
    spec.u = k;
    spec.v = 2;
    exact = exact && mlc_entropy(density_map(std::vector<WorldPolyline>{pl}, spec)) == std::log(static_cast<double>(k));
  }

  const std::vector<double> levels{0.0, 0.01, 0.05};
  std::vector<double> h(3, 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto clean = generate_scene(square_room(4.0), 5, 256, 5000 + seed);
    const auto spec = grid_for(scene_polylines(clean.frames), 512, 512, 0.25);
    for (std::size_t k = 0; k < 3; ++k)
      h[k] += mlc_entropy(density_map(scene_polylines(with_noise(clean, levels[k], seed).frames), spec)) / 10.0;
  }
  const bool increasing = h[0] < h[1] && h[1] < h[2];
  return {h1 == 0.0 && exact && increasing,
          fmt("single cell %.3g, uniform-k exact %s, H %.4f < %.4f < %.4f", h1, exact ? "yes" : "no", h[0], h[1], h[2])};
}

TrainConfig refine_config() {
  TrainConfig cfg;
  cfg.max_iters = 20;
  cfg.damping = 0.5;
  cfg.loss = LossKind::Wbc;
  cfg.iou_raster = 512;
  return cfg;
}

Outcome hmlc_iou_correlation() {
  const std::vector<double> levels{0.01, 0.02, 0.03, 0.05, 0.08};
  const auto clean = generate_scene(square_room(5.0), 9, 256, 6000);
  std::vector<std::vector<ViewFrame>> finals;
  std::vector<double> iou;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto noisy = with_noise(clean, levels[k], 60 + k);
    auto r = run(noisy, refine_config());
    iou.push_back(mean_iou2d(r.best_frames, *clean.ground_truth, 1024));
    finals.push_back(std::move(r.best_frames));
  }
  // Both entropies on one grid spanning every run.
  std::vector<WorldPolyline> all;
  for (const auto& f : finals) {
    const auto p = scene_polylines(f);
    all.insert(all.end(), p.begin(), p.end());
  }
  const auto spec = grid_for(all, 512, 512);
  std::vector<double> h;
  for (const auto& f : finals) h.push_back(scene_entropy(f, spec));

  auto ranks = [](const std::vector<double>& v, bool ascending) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return ascending ? v[a] < v[b] : v[a] > v[b];
    });
    std::vector<std::size_t> r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = i;
    return r;
  };
  const auto rh = ranks(h, true);
  const auto ri = ranks(iou, false);
  int match = 0;
  for (std::size_t k = 0; k < levels.size(); ++k) match += rh[k] == ri[k];
  std::string d;
  for (std::size_t k = 0; k < levels.size(); ++k) d += fmt(" [%.2f: H %.4f, IoU %.4f]", levels[k], h[k], iou[k]);
  return {match >= 4, fmt("rank match on %d/5 levels;", match) + d};
}

Outcome self_training_improves() {
  int improved = 0, h_ok = 0;
  double gain = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto clean = generate_scene(square_room(5.0), 9, 256, 7000 + seed);
    const auto noisy = with_noise(clean, 0.05, seed);
    const double before = mean_iou2d(noisy.frames, *clean.ground_truth, 1024);
    const auto r = run(noisy, refine_config());
    const double after = mean_iou2d(r.best_frames, *clean.ground_truth, 1024);
    improved += after > before;
    gain += (after - before) / 10.0;
    const auto& recs = r.trajectory.records;
    h_ok += *recs[r.trajectory.best_iter].h_mlc <= *recs[0].h_mlc;
  }
  return {improved >= 9 && h_ok == 10,
          fmt("IoU improved in %d/10 seeds (mean gain %.4f); H at best <= H at iter 0 in %d/10", improved, gain, h_ok)};
}

Outcome pose_noise_degradation() {
  const std::vector<double> trans{0.0, 0.02, 0.3};
  std::vector<double> iou(3, 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto clean = generate_scene(square_room(5.0), 9, 256, 8000 + seed);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto noisy = with_noise(clean, 0.05, seed, trans[k]);
      const auto r = run(noisy, refine_config());
      iou[k] += mean_iou2d(r.best_frames, *clean.ground_truth, 1024) / 10.0;
    }
  }
  const bool ok = iou[2] < iou[1] && std::abs(iou[1] - iou[0]) <= 0.02;
  return {ok, fmt("mean IoU %.4f (0 m), %.4f (0.02 m), %.4f (0.3 m)", iou[0], iou[1], iou[2])};
}

Outcome metric_sanity() {
  const Polygon2 a{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Polygon2 far{{3, 0}, {4, 0}, {4, 1}, {3, 1}};
  const Polygon2 half{{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}};
  const double same = iou2d(a, a), disjoint = iou2d(a, far), shifted = iou2d(a, half);

  const auto scene = generate_scene(square_room(4.0), 1, 256, 9000);
  const auto gt = layout_depth(scene.frames[0].floor, scene.frames[0].ceiling, 256, 128);
  std::vector<double> scaled(gt.depth);
  for (double& x : scaled) x *= 1.3;
  const double d1 = depth_metrics(scaled, gt.depth).delta1;

  SplitMix64 rng(9);
  bool triangle = true;
  for (int k = 0; k < 50; ++k) {
    std::vector<double> x(gt.depth), y(gt.depth), z(gt.depth);
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] *= rng.uniform(0.8, 1.2);
      z[i] += rng.uniform(0.0, 0.5);
    }
    triangle = triangle && depth_metrics(x, z).rmse <= depth_metrics(x, y).rmse + depth_metrics(y, z).rmse + 1e-12;
  }
  const bool ok = same == 1.0 && disjoint == 0.0 && std::abs(shifted - 1.0 / 3.0) <= 0.01 && d1 == 0.0 && triangle;
  return {ok, fmt("iou(A,A) %.3g, disjoint %.3g, half shift %.4f, delta1(x1.3) %.3g, triangle %s", same,
                  disjoint, shifted, d1, triangle ? "ok" : "violated")};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "mlc_acceptance_cli";
  fs::remove_all(dir);
  const std::string bin = MLC_CLI_PATH;
  struct Cmd {
    std::string args;
    std::vector<std::string> outputs;
  };
  // {D} is replaced by the per-thread-cap output directory.
  const std::vector<Cmd> cmds{
      {"synth --room lshape --size 6 --n-views 5 --width 256 --seed 11 --noise-boundary-std 0.03 "
       "--noise-outlier-rate 0.05 --noise-outlier-std 0.2 --noise-pose-trans-std 0.02 --out {D}/scene.json",
       {"scene.json"}},
      {"reproject --scene {D}/scene.json --target view_002 --out {D}/stack.csv", {"stack.csv"}},
      {"pseudo-label --scene {D}/scene.json --estimator median --view-fraction 0.6 --seed 3 "
       "--out {D}/pl.json --out-csv {D}/pl.csv",
       {"pl.json", "pl.csv"}},
      {"metric --scene {D}/scene.json --grid 256 256 --out-map {D}/map.pgm --out {D}/cells.csv",
       {"map.pgm", "cells.csv"}},
      {"evaluate --scene {D}/scene.json --raster 512 --out {D}/report.json --out-csv {D}/report.csv",
       {"report.json", "report.csv"}},
      {"refine --scene {D}/scene.json --iters 6 --lambda 0.5 --loss wbc --grid 256 --raster 256 "
       "--out-traj {D}/traj.csv --out-scene {D}/best.json",
       {"traj.csv", "best.json"}},
      {"render-density --scene {D}/scene.json --grid 128 96 --out {D}/density.pgm", {"density.pgm"}},
  };
  const std::vector<std::string> caps{"1", "3"};
  std::size_t files = 0;
  for (std::size_t ci = 0; ci < cmds.size(); ++ci) {
    for (const auto& cap : caps) {
      const fs::path d = dir / cap;
      fs::create_directories(d);
      std::string args = cmds[ci].args;
      for (std::size_t p; (p = args.find("{D}")) != std::string::npos;) args.replace(p, 3, d.string());
      const std::string line = "MLC_THREADS=" + cap + " '" + bin + "' " + args + " > '" +
                               (d / ("stdout_" + std::to_string(ci))).string() + "' 2> /dev/null";
      if (std::system(line.c_str()) != 0) return {false, "command failed: " + cmds[ci].args};
    }
    std::vector<std::string> outs = cmds[ci].outputs;
    outs.push_back("stdout_" + std::to_string(ci));
    for (const auto& o : outs) {
      const std::string a = slurp(dir / caps[0] / o), b = slurp(dir / caps[1] / o);
      if (a != b) return {false, "output differs across thread caps: " + o};
      if (o.rfind("stdout_", 0) != 0 && a.empty()) return {false, "empty output: " + o};
      ++files;
    }
  }
  fs::remove_all(dir);
  return {true, fmt("%zu subcommands, %zu outputs byte-identical under MLC_THREADS=1 and 3", cmds.size(), files)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"projection round trip", projection_round_trip},
      {"oracle equivalence", oracle_equivalence},
      {"noise-free consistency", noise_free_consistency},
      {"median robustness", median_robustness},
      {"view-count monotonicity", view_count_monotonicity},
      {"entropy metric", entropy_metric},
      {"H_MLC / IoU correlation", hmlc_iou_correlation},
      {"self-training improves geometry", self_training_improves},
      {"pose-noise degradation", pose_noise_degradation},
      {"metric sanity", metric_sanity},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
