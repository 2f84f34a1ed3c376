// Serial reference vs OpenMP kernels on a synthetic 9-view room.

#include "mlc/consistency.hpp"
#include "mlc/evaluation.hpp"
#include "mlc/serial.hpp"
#include "mlc/synth.hpp"

#include <benchmark/benchmark.h>

namespace {

const mlc::Scene& scene() {
  static const mlc::Scene s = [] {
    auto base = mlc::generate_scene(mlc::square_room(6.0), 9, 1024, 7);
    mlc::NoiseSpec n;
    n.boundary_std = 0.02;
    n.seed = 7;
    return mlc::perturb(base, n);
  }();
  return s;
}

void BM_BuildStack_Serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(mlc::serial::build_stack(scene().frames, 0, mlc::BoundaryKind::Floor));
}
void BM_BuildStack_Omp(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(mlc::build_stack(scene().frames, 0, mlc::BoundaryKind::Floor));
}

void BM_Fuse_Serial(benchmark::State& st) {
  const auto stack = mlc::build_stack(scene().frames, 0, mlc::BoundaryKind::Floor);
  for (auto _ : st) benchmark::DoNotOptimize(mlc::serial::fuse(stack, mlc::Estimator::Median));
}
void BM_Fuse_Omp(benchmark::State& st) {
  const auto stack = mlc::build_stack(scene().frames, 0, mlc::BoundaryKind::Floor);
  for (auto _ : st) benchmark::DoNotOptimize(mlc::fuse(stack, mlc::Estimator::Median));
}

void BM_Density_Serial(benchmark::State& st) {
  const auto polys = mlc::scene_polylines(scene().frames);
  const auto spec = mlc::grid_for(polys, 512, 512);
  for (auto _ : st) benchmark::DoNotOptimize(mlc::serial::density_map(polys, spec));
}
void BM_Density_Omp(benchmark::State& st) {
  const auto polys = mlc::scene_polylines(scene().frames);
  const auto spec = mlc::grid_for(polys, 512, 512);
  for (auto _ : st) benchmark::DoNotOptimize(mlc::density_map(polys, spec));
}

mlc::Polygon2 poly(std::size_t i) {
  const auto pose = mlc::CameraPose::upright(0.0, Eigen::Vector3d::Zero());
  return mlc::floor_polygon(scene().frames[i].floor, pose);
}
void BM_Raster_Serial(benchmark::State& st) {
  const auto a = poly(0), b = poly(1);
  for (auto _ : st) benchmark::DoNotOptimize(mlc::serial::raster_overlap(a, b, 1024));
}
void BM_Raster_Omp(benchmark::State& st) {
  const auto a = poly(0), b = poly(1);
  for (auto _ : st) benchmark::DoNotOptimize(mlc::raster_overlap(a, b, 1024));
}

void BM_Depth_Serial(benchmark::State& st) {
  const auto& f = scene().frames[0];
  for (auto _ : st) benchmark::DoNotOptimize(mlc::serial::layout_depth(f.floor, f.ceiling, 1024, 512));
}
void BM_Depth_Omp(benchmark::State& st) {
  const auto& f = scene().frames[0];
  for (auto _ : st) benchmark::DoNotOptimize(mlc::layout_depth(f.floor, f.ceiling, 1024, 512));
}

}  // namespace

BENCHMARK(BM_BuildStack_Serial);
BENCHMARK(BM_BuildStack_Omp);
BENCHMARK(BM_Fuse_Serial);
BENCHMARK(BM_Fuse_Omp);
BENCHMARK(BM_Density_Serial);
BENCHMARK(BM_Density_Omp);
BENCHMARK(BM_Raster_Serial);
BENCHMARK(BM_Raster_Omp);
BENCHMARK(BM_Depth_Serial);
BENCHMARK(BM_Depth_Omp);

BENCHMARK_MAIN();
