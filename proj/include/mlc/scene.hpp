#pragma once

#include "mlc/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlc {

// Fused per-column target for one view: median (or mean) of the re-projected
// boundaries, their spread, and how many views contributed.
struct PseudoLabel {
  std::vector<double> lat_bar;
  std::vector<double> sigma;
  std::vector<std::size_t> support;

  std::size_t width() const { return lat_bar.size(); }
};

struct ViewFrame {
  std::string id;
  CameraPose pose;
  SphericalBoundary floor;
  std::optional<SphericalBoundary> ceiling;
  // True when the input omitted floor_height and the default was substituted.
  bool floor_height_defaulted = false;

  const SphericalBoundary& boundary(BoundaryKind kind) const;
  bool has(BoundaryKind kind) const {
    return kind == BoundaryKind::Floor || ceiling.has_value();
  }
};

struct FramePseudoLabel {
  std::string id;
  BoundaryKind kind = BoundaryKind::Floor;
  PseudoLabel label;
};

struct SceneMeta {
  std::string rng = "splitmix64";
  std::optional<std::uint64_t> seed;
};

// Registered views sharing one world frame.
struct Scene {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<ViewFrame> frames;
  std::optional<std::vector<ViewFrame>> ground_truth;
  std::optional<std::vector<FramePseudoLabel>> pseudo_labels;
  SceneMeta meta;

  std::size_t size() const { return frames.size(); }
  std::size_t index_of(const std::string& id) const;

  // Checks shared width, unique ids and ground-truth correspondence.
  void validate() const;
};

// Returns a copy of the pose with ceiling_height filled in from the frame's
// floor/ceiling boundary pair (no-op for frames without a ceiling).
CameraPose resolve_ceiling_height(const ViewFrame& frame);

// Every world polyline in the frames (floor, plus ceiling unless floor_only).
std::vector<WorldPolyline> scene_polylines(const std::vector<ViewFrame>& frames,
                                           bool floor_only = false);

}  // namespace mlc
