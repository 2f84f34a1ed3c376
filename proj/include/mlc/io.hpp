#pragma once

#include "mlc/evaluation.hpp"
#include "mlc/reprojection.hpp"
#include "mlc/scene.hpp"
#include "mlc/selftrain.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace mlc::io {

inline constexpr const char* kSceneVersion = "1";

struct LoadOptions {
  // Boundary arrays hold pixel rows (pixel-center convention) instead of radians.
  bool pixel_rows = false;
  // Called once per frame whose floor_height was missing and defaulted.
  std::function<void(const std::string& frame_id)> on_default_height;
};

Scene parse_scene(const std::string& text, const LoadOptions& opts = {});
std::string serialize_scene(const Scene& scene);

Scene load_scene(const std::filesystem::path& path, const LoadOptions& opts = {});
void save_scene(const Scene& scene, const std::filesystem::path& path);

std::string format_double(double v);
std::string csv_field(const std::string& s);

void write_stack_csv(const BoundaryStack& stack, const Scene& scene, std::ostream& os);
void write_pseudo_label_csv(const std::vector<FramePseudoLabel>& labels, std::ostream& os);
void write_trajectory_csv(const TrainTrajectory& traj, std::ostream& os);
void write_report_csv(const LayoutEvalReport& report, std::ostream& os);
std::string report_json(const LayoutEvalReport& report);

void write_text(const std::filesystem::path& path, const std::string& bytes);

}  // namespace mlc::io
