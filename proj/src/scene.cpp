#include "mlc/scene.hpp"

#include "mlc/error.hpp"

#include <set>
#include <sstream>

namespace mlc {

const SphericalBoundary& ViewFrame::boundary(BoundaryKind kind) const {
  if (kind == BoundaryKind::Floor) return floor;
  if (!ceiling) throw ArgumentError("frame '" + id + "' has no ceiling boundary");
  return *ceiling;
}

std::size_t Scene::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (frames[i].id == id) return i;
  throw ArgumentError("no frame with id '" + id + "'");
}

void Scene::validate() const {
  if (frames.empty()) throw ValidationError("scene has no frames");
  std::set<std::string> ids;
  auto check_frame = [&](const ViewFrame& f, const char* where) {
    if (f.floor.width() != width || (f.ceiling && f.ceiling->width() != width)) {
      std::ostringstream os;
      os << where << " frame '" << f.id << "' boundary width differs from image_width " << width;
      throw ValidationError(os.str());
    }
  };
  for (const auto& f : frames) {
    check_frame(f, "");
    if (!ids.insert(f.id).second) throw ValidationError("duplicate frame id '" + f.id + "'");
  }
  if (ground_truth) {
    if (ground_truth->size() != frames.size())
      throw ValidationError("ground_truth frame count differs from frames");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      check_frame((*ground_truth)[i], "ground_truth");
      if ((*ground_truth)[i].id != frames[i].id)
        throw ValidationError("ground_truth frame order does not match frames");
    }
  }
  if (pseudo_labels) {
    for (const auto& pl : *pseudo_labels) {
      if (!ids.count(pl.id)) throw ValidationError("pseudo label for unknown frame '" + pl.id + "'");
      if (pl.label.lat_bar.size() != width || pl.label.sigma.size() != width ||
          pl.label.support.size() != width)
        throw ValidationError("pseudo label for '" + pl.id + "' has wrong width");
    }
  }
}

CameraPose resolve_ceiling_height(const ViewFrame& frame) {
  if (!frame.ceiling) return frame.pose;
  return frame.pose.with_ceiling_height(
      ceiling_height(frame.floor, *frame.ceiling, frame.pose.floor_height()));
}

std::vector<WorldPolyline> scene_polylines(const std::vector<ViewFrame>& frames,
                                           bool floor_only) {
  std::vector<WorldPolyline> out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    const CameraPose pose = resolve_ceiling_height(f);
    out.push_back(boundary_to_world(f.floor, pose));
    out.back().source_view = i;
    if (!floor_only && f.ceiling) {
      out.push_back(boundary_to_world(*f.ceiling, pose));
      out.back().source_view = i;
    }
  }
  return out;
}

}  // namespace mlc
