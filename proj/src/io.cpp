#include "mlc/io.hpp"

#include "mlc/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace mlc::io {

using json = nlohmann::ordered_json;

namespace {

std::vector<double> number_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw FormatError(what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw FormatError(what + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing field '" + key + "'");
  return *it;
}

SphericalBoundary read_boundary(const json& j, BoundaryKind kind, std::size_t width,
                                std::size_t height, const LoadOptions& opts,
                                const std::string& where) {
  auto values = number_array(j, where);
  if (values.size() != width) {
    std::ostringstream os;
    os << where << " has " << values.size() << " entries, expected image_width " << width;
    throw ValidationError(os.str());
  }
  if (opts.pixel_rows)
    for (double& v : values) v = row_to_latitude(v, height);
  return SphericalBoundary(std::move(values), kind);
}

ViewFrame read_frame(const json& j, std::size_t width, std::size_t height, const LoadOptions& opts,
                     const std::string& where) {
  if (!j.is_object()) throw FormatError(where + " must be an object");
  const json& id = field(j, "id", where);
  if (!id.is_string()) throw FormatError(where + ".id must be a string");
  const std::string name = where + " '" + id.get<std::string>() + "'";

  const json& pose = field(j, "pose", name);
  const auto rot = number_array(field(pose, "rotation", name + ".pose"), name + ".pose.rotation");
  const auto trans = number_array(field(pose, "translation", name + ".pose"), name + ".pose.translation");
  if (rot.size() != 9 || trans.size() != 3) throw FormatError(name + ": pose needs 9 rotation and 3 translation values");
  Eigen::Matrix3d r;
  r << rot[0], rot[1], rot[2], rot[3], rot[4], rot[5], rot[6], rot[7], rot[8];
  check_rotation(r, 1e-6);
  try {
    check_rotation(r, 1e-9);
  } catch (const ValidationError&) {
    r = nearest_rotation(r);
  }

  double h = kDefaultCameraHeight;
  bool defaulted = true;
  if (auto it = j.find("floor_height"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) throw FormatError(name + ".floor_height must be a number or null");
    h = it->get<double>();
    defaulted = false;
  }
  if (defaulted && opts.on_default_height) opts.on_default_height(id.get<std::string>());

  ViewFrame f{id.get<std::string>(),
              CameraPose(r, Eigen::Vector3d(trans[0], trans[1], trans[2]), h),
              read_boundary(field(j, "boundary_floor", name), BoundaryKind::Floor, width, height,
                            opts, name + ".boundary_floor"),
              std::nullopt, defaulted};
  if (auto it = j.find("boundary_ceiling"); it != j.end() && !it->is_null())
    f.ceiling = read_boundary(*it, BoundaryKind::Ceiling, width, height, opts,
                              name + ".boundary_ceiling");
  return f;
}

json write_frame(const ViewFrame& f) {
  json j;
  j["id"] = f.id;
  json pose;
  json rot = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(f.pose.rotation()(r, c));
  pose["rotation"] = rot;
  pose["translation"] = {f.pose.translation().x(), f.pose.translation().y(), f.pose.translation().z()};
  j["pose"] = pose;
  j["floor_height"] = f.floor_height_defaulted ? json(nullptr) : json(f.pose.floor_height());
  j["boundary_floor"] = f.floor.values();
  j["boundary_ceiling"] = f.ceiling ? json(f.ceiling->values()) : json(nullptr);
  return j;
}

}  // namespace

Scene parse_scene(const std::string& text, const LoadOptions& opts) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("scene is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("scene must be a JSON object");
  const json& version = field(doc, "version", "scene");
  if (!version.is_string() || version.get<std::string>() != kSceneVersion)
    throw FormatError("unsupported scene version (expected \"1\")");

  Scene scene;
  try {
    scene.width = field(doc, "image_width", "scene").get<std::size_t>();
    scene.height = field(doc, "image_height", "scene").get<std::size_t>();
  } catch (const json::type_error&) {
    throw FormatError("image_width and image_height must be non-negative integers");
  }
  if (scene.width < kMinColumns || scene.height == 0)
    throw ValidationError("image dimensions too small");

  const json& frames = field(doc, "frames", "scene");
  if (!frames.is_array()) throw FormatError("frames must be an array");
  for (std::size_t i = 0; i < frames.size(); ++i)
    scene.frames.push_back(read_frame(frames[i], scene.width, scene.height, opts,
                                      "frames[" + std::to_string(i) + "]"));

  if (auto it = doc.find("ground_truth"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw FormatError("ground_truth must be an array");
    LoadOptions quiet = opts;
    quiet.on_default_height = nullptr;
    std::vector<ViewFrame> gt;
    for (std::size_t i = 0; i < it->size(); ++i)
      gt.push_back(read_frame((*it)[i], scene.width, scene.height, quiet,
                              "ground_truth[" + std::to_string(i) + "]"));
    scene.ground_truth = std::move(gt);
  }

  if (auto it = doc.find("pseudo_labels"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw FormatError("pseudo_labels must be an array");
    std::vector<FramePseudoLabel> labels;
    for (const auto& e : *it) {
      FramePseudoLabel pl;
      const json& id = field(e, "id", "pseudo_labels entry");
      if (!id.is_string()) throw FormatError("pseudo_labels id must be a string");
      pl.id = id.get<std::string>();
      if (auto k = e.find("kind"); k != e.end()) {
        if (*k == "floor") pl.kind = BoundaryKind::Floor;
        else if (*k == "ceiling") pl.kind = BoundaryKind::Ceiling;
        else throw FormatError("pseudo_labels kind must be floor or ceiling");
      }
      pl.label.lat_bar = number_array(field(e, "lat_bar", pl.id), "lat_bar");
      pl.label.sigma = number_array(field(e, "sigma", pl.id), "sigma");
      for (double s : number_array(field(e, "support", pl.id), "support")) {
        if (!(s >= 0.0)) throw FormatError("support must be non-negative");
        pl.label.support.push_back(static_cast<std::size_t>(s));
      }
      labels.push_back(std::move(pl));
    }
    scene.pseudo_labels = std::move(labels);
  }

  if (auto it = doc.find("meta"); it != doc.end() && it->is_object()) {
    if (auto r = it->find("rng"); r != it->end() && r->is_string()) scene.meta.rng = r->get<std::string>();
    if (auto s = it->find("seed"); s != it->end() && s->is_number_integer())
      scene.meta.seed = s->get<std::uint64_t>();
  }

  scene.validate();
  return scene;
}

std::string serialize_scene(const Scene& scene) {
  json doc;
  doc["version"] = kSceneVersion;
  doc["image_width"] = scene.width;
  doc["image_height"] = scene.height;
  json frames = json::array();
  for (const auto& f : scene.frames) frames.push_back(write_frame(f));
  doc["frames"] = frames;
  if (scene.ground_truth) {
    json gt = json::array();
    for (const auto& f : *scene.ground_truth) gt.push_back(write_frame(f));
    doc["ground_truth"] = gt;
  }
  if (scene.pseudo_labels) {
    json labels = json::array();
    for (const auto& pl : *scene.pseudo_labels) {
      json e;
      e["id"] = pl.id;
      e["kind"] = to_string(pl.kind);
      e["lat_bar"] = pl.label.lat_bar;
      e["sigma"] = pl.label.sigma;
      e["support"] = pl.label.support;
      labels.push_back(e);
    }
    doc["pseudo_labels"] = labels;
  }
  json meta;
  meta["rng"] = scene.meta.rng;
  meta["seed"] = scene.meta.seed ? json(*scene.meta.seed) : json(nullptr);
  doc["meta"] = meta;
  return doc.dump(1) + "\n";
}

Scene load_scene(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open scene '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scene(ss.str(), opts);
}

void write_text(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  write_text(path, serialize_scene(scene));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_stack_csv(const BoundaryStack& stack, const Scene& scene, std::ostream& os) {
  os << "theta,view,lat,valid\r\n";
  for (Eigen::Index r = 0; r < stack.lat.rows(); ++r)
    for (Eigen::Index s = 0; s < stack.lat.cols(); ++s) {
      const bool valid = stack.valid(r, s);
      os << r << ',' << csv_field(scene.frames[stack.sources[static_cast<std::size_t>(s)]].id) << ','
         << (valid ? format_double(stack.lat(r, s)) : std::string()) << ',' << (valid ? 1 : 0)
         << "\r\n";
    }
}

void write_pseudo_label_csv(const std::vector<FramePseudoLabel>& labels, std::ostream& os) {
  os << "view,theta,lat_bar,sigma,support\r\n";
  for (const auto& pl : labels)
    for (std::size_t c = 0; c < pl.label.width(); ++c)
      os << csv_field(pl.id) << ',' << c << ',' << format_double(pl.label.lat_bar[c]) << ','
         << format_double(pl.label.sigma[c]) << ',' << pl.label.support[c] << "\r\n";
}

namespace {
std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
}  // namespace

void write_trajectory_csv(const TrainTrajectory& traj, std::ostream& os) {
  os << "iter,h_mlc,wbc,l1,iou2d,iou3d\r\n";
  for (const auto& r : traj.records)
    os << r.iter << ',' << opt(r.h_mlc) << ',' << format_double(r.wbc) << ','
       << format_double(r.l1) << ',' << opt(r.iou2d) << ',' << opt(r.iou3d) << "\r\n";
}

void write_report_csv(const LayoutEvalReport& report, std::ostream& os) {
  os << "view,iou2d,iou3d,rmse,delta1\r\n";
  for (const auto& v : report.per_view)
    os << csv_field(v.id) << ',' << format_double(v.iou2d) << ',' << opt(v.iou3d) << ','
       << format_double(v.rmse) << ',' << format_double(v.delta1) << "\r\n";
}

std::string report_json(const LayoutEvalReport& report) {
  auto num = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["iou2d"] = report.iou2d;
  j["iou3d"] = num(report.iou3d);
  j["rmse"] = report.rmse;
  j["delta1"] = report.delta1;
  json views = json::array();
  for (const auto& v : report.per_view) {
    json e;
    e["id"] = v.id;
    e["iou2d"] = v.iou2d;
    e["iou3d"] = num(v.iou3d);
    e["rmse"] = v.rmse;
    e["delta1"] = v.delta1;
    views.push_back(e);
  }
  j["per_view"] = views;
  return j.dump(2) + "\n";
}

}  // namespace mlc::io
