#include "mlc/error.hpp"
#include "mlc/pseudolabel.hpp"
#include "mlc/synth.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mlc;
using std::numbers::pi;

namespace {

std::vector<oracle::Pt> to_oracle(const Polygon2& p) {
  std::vector<oracle::Pt> out;
  for (const auto& q : p) out.push_back({q.x(), q.y()});
  return out;
}

bool same_frames(const std::vector<ViewFrame>& a, const std::vector<ViewFrame>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || !(a[i].floor == b[i].floor)) return false;
    if (a[i].ceiling.has_value() != b[i].ceiling.has_value()) return false;
    if (a[i].ceiling && !(*a[i].ceiling == *b[i].ceiling)) return false;
    if (a[i].pose.rotation() != b[i].pose.rotation() || a[i].pose.translation() != b[i].pose.translation())
      return false;
  }
  return true;
}

double pseudo_label_error(double std, std::uint64_t seed) {
  const auto clean = generate_scene(square_room(5.0), 5, 128, 500 + seed);
  NoiseSpec n;
  n.boundary_std = std;
  n.seed = seed;
  const auto noisy = perturb(clean, n);
  double err = 0.0;
  for (std::size_t t = 0; t < noisy.size(); ++t) {
    const auto pl = fuse(build_stack(noisy, t, BoundaryKind::Floor), Estimator::Median);
    for (std::size_t c = 0; c < 128; ++c) err += std::abs(pl.lat_bar[c] - clean.frames[t].floor[c]);
  }
  return err / (128.0 * static_cast<double>(noisy.size()));
}

}  // namespace

TEST(Rooms, Validation) {
  EXPECT_NO_THROW(square_room(4.0).validate());
  EXPECT_NO_THROW(lshape_room(6.0).validate());
  EXPECT_NEAR(polygon_area(square_room(4.0).footprint), 16.0, 1e-12);
  EXPECT_NEAR(polygon_area(lshape_room(6.0).footprint), 27.0, 1e-12);
  RoomSpec bow;
  bow.footprint = {{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  EXPECT_FALSE(is_simple(bow.footprint));
  EXPECT_THROW(bow.validate(), ArgumentError);
  RoomSpec cw = square_room(2.0);
  std::reverse(cw.footprint.begin(), cw.footprint.end());
  EXPECT_THROW(cw.validate(), ArgumentError);
  EXPECT_THROW(square_room(-1.0), Error);
}

TEST(Rooms, StarVisibility) {
  const auto l = lshape_room(6.0).footprint;  // (+x, +z) quarter removed
  EXPECT_TRUE(star_visible(l, {-1.0, -1.0}));
  EXPECT_FALSE(star_visible(l, {2.0, -2.0}));
  EXPECT_FALSE(star_visible(l, {-2.0, 2.0}));
  EXPECT_TRUE(star_visible(square_room(4.0).footprint, {1.9, 1.9}));
}

TEST(ExactBoundary, CentralSymmetryInNgon) {
  const auto room = ngon_room(64, 2.0);
  const auto b = exact_boundary(room, CameraPose::upright(0.3, Eigen::Vector3d::Zero()), 256,
                                BoundaryKind::Floor);
  for (std::size_t c = 0; c < 256; ++c) EXPECT_NEAR(b[c], -std::atan(1.6 / 2.0), 1e-3);
}

TEST(ExactBoundary, CornerRay) {
  // Column 4 of 8 sits at longitude pi/8; yaw pi/8 turns it to the (+x, +z) corner.
  const auto room = square_room(4.0);
  const auto pose = CameraPose::upright(pi / 8, Eigen::Vector3d::Zero());
  const auto b = exact_boundary(room, pose, 8, BoundaryKind::Floor);
  EXPECT_NEAR(b[4], -std::atan(1.6 / (2.0 * std::sqrt(2.0))), 1e-12);
  const auto c = exact_boundary(room, pose, 8, BoundaryKind::Ceiling);
  EXPECT_NEAR(c[4], std::atan(1.2 / (2.0 * std::sqrt(2.0))), 1e-12);
}

TEST(ExactBoundary, MatchesRayCastOracle) {
  const auto room = lshape_room(6.0);
  const auto fp = to_oracle(room.footprint);
  const oracle::Cam cam{-1.2, -0.7, 2.1};
  const auto pose = CameraPose::upright(cam.yaw, Eigen::Vector3d(cam.x, 0, cam.z));
  const auto b = exact_boundary(room, pose, 300, BoundaryKind::Floor);
  for (std::size_t c = 0; c < 300; ++c) {
    const auto hit = oracle::wall_hit(fp, cam, oracle::column_heading(cam, c, 300));
    const double d = std::hypot(hit.x - cam.x, hit.z - cam.z);
    EXPECT_NEAR(b[c], -std::atan(1.6 / d), 1e-12);
  }
}

TEST(GenerateScene, WallsAndCeilingHeight) {
  std::uint64_t seed = 0;
  for (const auto& room : {square_room(4.0, 1.5, 1.1), ngon_room(7, 3.0), lshape_room(6.0, 1.4, 1.3)}) {
    const auto fp = to_oracle(room.footprint);
    const auto scene = generate_scene(room, 4, 256, seed++);
    EXPECT_EQ(scene.height, 128u);
    ASSERT_TRUE(scene.ground_truth);
    for (const auto& f : scene.frames) {
      EXPECT_EQ(f.pose.floor_height(), room.h_floor);
      const Eigen::Vector2d p(f.pose.translation().x(), f.pose.translation().z());
      EXPECT_GE(distance_to_walls(room.footprint, p), 0.2);
      EXPECT_TRUE(star_visible(room.footprint, p));
      for (const auto& q : boundary_to_world(f.floor, f.pose).points)
        EXPECT_LT(oracle::wall_distance(fp, {q.x(), q.z()}), 1e-9);
      EXPECT_NEAR(ceiling_height(f.floor, *f.ceiling, room.h_floor), room.h_ceil, 1e-9);
    }
  }
}

TEST(GenerateScene, Deterministic) {
  const auto a = generate_scene(lshape_room(6.0), 5, 128, 77);
  const auto b = generate_scene(lshape_room(6.0), 5, 128, 77);
  const auto c = generate_scene(lshape_room(6.0), 5, 128, 78);
  EXPECT_TRUE(same_frames(a.frames, b.frames));
  EXPECT_FALSE(same_frames(a.frames, c.frames));
  EXPECT_EQ(a.meta.rng, "splitmix64");
  EXPECT_EQ(a.meta.seed, 77u);
}

TEST(GenerateScene, TooSmallRoom) {
  SynthOptions o;
  o.wall_clearance = 1.0;
  EXPECT_THROW(generate_scene(square_room(1.5), 2, 64, 1, o), GenerationError);
  EXPECT_THROW(generate_scene(square_room(4.0), 0, 64, 1), ArgumentError);
}

TEST(Perturb, ZeroNoiseIsIdentity) {
  const auto s = generate_scene(square_room(4.0), 4, 128, 3);
  EXPECT_TRUE(same_frames(perturb(s, NoiseSpec{}).frames, s.frames));
}

TEST(Perturb, DeterministicAndLeavesTruth) {
  const auto s = generate_scene(square_room(4.0), 4, 128, 3);
  NoiseSpec n;
  n.boundary_std = 0.02;
  n.outlier_rate = 0.1;
  n.outlier_std = 0.3;
  n.pose_trans_std = 0.05;
  n.pose_rot_std = 0.01;
  n.seed = 9;
  const auto a = perturb(s, n);
  const auto b = perturb(s, n);
  EXPECT_TRUE(same_frames(a.frames, b.frames));
  EXPECT_FALSE(same_frames(a.frames, s.frames));
  EXPECT_TRUE(same_frames(*a.ground_truth, *s.ground_truth));
  for (const auto& f : a.frames) {
    for (double v : f.floor.values()) EXPECT_LE(v, -kDefaultLatMin);
    for (double v : f.ceiling->values()) EXPECT_GE(v, kDefaultLatMin);
    EXPECT_NO_THROW(check_rotation(f.pose.rotation(), 1e-9));
  }
}

TEST(Perturb, BoundaryNoiseStatistics) {
  const auto s = generate_scene(square_room(6.0), 8, 512, 1);
  NoiseSpec n;
  n.boundary_std = 0.02;
  n.seed = 4;
  const auto p = perturb(s, n);
  double sum = 0.0, sq = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t c = 0; c < 512; ++c) {
      const double d = p.frames[i].floor[c] - s.frames[i].floor[c];
      sum += d;
      sq += d * d;
      ++k;
    }
  const double mean = sum / static_cast<double>(k);
  EXPECT_NEAR(mean, 0.0, 4.0 * 0.02 / std::sqrt(static_cast<double>(k)));
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(k)), 0.02, 0.001);
}

TEST(Perturb, PseudoLabelErrorGrowsWithNoise) {
  const std::vector<double> levels{0.01, 0.02, 0.05};
  std::vector<double> err(levels.size(), 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    for (std::size_t k = 0; k < levels.size(); ++k) err[k] += pseudo_label_error(levels[k], seed);
  EXPECT_LT(err[0], err[1]);
  EXPECT_LT(err[1], err[2]);
}

TEST(Perturb, InvalidSpec) {
  const auto s = generate_scene(square_room(4.0), 2, 64, 3);
  NoiseSpec n;
  n.boundary_std = -1.0;
  EXPECT_THROW(perturb(s, n), ArgumentError);
  n = NoiseSpec{};
  n.outlier_rate = 1.0;
  EXPECT_THROW(perturb(s, n), ArgumentError);
}
