#include "mlc/cli.hpp"

#include "mlc/consistency.hpp"
#include "mlc/error.hpp"
#include "mlc/evaluation.hpp"
#include "mlc/io.hpp"
#include "mlc/parallel.hpp"
#include "mlc/pseudolabel.hpp"
#include "mlc/reprojection.hpp"
#include "mlc/selftrain.hpp"
#include "mlc/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace mlc::cli {

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument:
      return kUsage;
    case ErrorKind::Validation:
    case ErrorKind::Format:
    case ErrorKind::Io:
      return kFormat;
    default:
      return kNumeric;
  }
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  err << j.dump() << '\n';
}

struct SceneInput {
  std::string path;
  bool pixel_rows = false;
};

void add_scene_input(CLI::App* cmd, SceneInput& in) {
  cmd->add_option("--scene", in.path, "Scene JSON")->required();
  cmd->add_flag("--pixel-rows", in.pixel_rows, "Boundaries are stored as pixel rows, not radians");
}

Scene load(const SceneInput& in, std::ostream& err) {
  io::LoadOptions opts;
  opts.pixel_rows = in.pixel_rows;
  opts.on_default_height = [&err](const std::string& id) {
    nlohmann::ordered_json j;
    j["warning"] = "missing_floor_height";
    j["message"] = "frame '" + id + "' has no floor_height; using 1.6 m";
    err << j.dump() << '\n';
  };
  return io::load_scene(in.path, opts);
}

BoundaryKind parse_kind(const std::string& s) {
  if (s == "floor") return BoundaryKind::Floor;
  if (s == "ceiling") return BoundaryKind::Ceiling;
  throw ArgumentError("unknown boundary kind '" + s + "'");
}

Interpolation parse_interp(const std::string& s) {
  if (s == "great-circle") return Interpolation::GreatCircle;
  if (s == "linear") return Interpolation::Linear;
  throw ArgumentError("unknown interpolation '" + s + "'");
}

template <class Fn>
void write_stream(const std::string& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  io::write_text(path, os.str());
}

struct GridArgs {
  std::vector<std::size_t> grid{kDefaultGridSize, kDefaultGridSize};
  double padding = kDefaultGridPadding;
  bool floor_only = false;
};

void add_grid_args(CLI::App* cmd, GridArgs& g) {
  cmd->add_option("--grid", g.grid, "Grid size U V")->expected(2);
  cmd->add_option("--padding", g.padding, "Bounding-box padding fraction per side");
  cmd->add_flag("--floor-only", g.floor_only, "Use floor boundaries only");
}

DensityGrid scene_density(const Scene& scene, const GridArgs& g) {
  const auto polylines = scene_polylines(scene.frames, g.floor_only);
  return density_map(polylines, g.grid.at(0), g.grid.at(1), g.padding);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  parallel::apply_env_thread_cap();

  CLI::App app{"Multi-view layout consistency toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic multi-view room scene");
  std::string room = "square";
  double size = 4.0, h_floor = kDefaultCameraHeight, h_ceil = 1.2;
  std::size_t n_views = 5, width = 256, sides = 8;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> noise_seed;
  bool no_ceiling = false;
  NoiseSpec noise;
  std::string synth_out;
  synth->add_option("--room", room, "square | lshape | ngon")
      ->check(CLI::IsMember({"square", "lshape", "ngon"}));
  synth->add_option("--size", size, "Side length (square, lshape) or diameter (ngon), meters");
  synth->add_option("--sides", sides, "Number of sides for --room ngon");
  synth->add_option("--n-views", n_views);
  synth->add_option("--width", width, "Panorama width in columns");
  synth->add_option("--seed", seed);
  synth->add_option("--h-floor", h_floor, "Camera height above the floor, meters");
  synth->add_option("--h-ceil", h_ceil, "Ceiling distance above the camera, meters");
  synth->add_flag("--no-ceiling", no_ceiling);
  synth->add_option("--noise-boundary-std", noise.boundary_std);
  synth->add_option("--noise-outlier-rate", noise.outlier_rate);
  synth->add_option("--noise-outlier-std", noise.outlier_std);
  synth->add_option("--noise-pose-trans-std", noise.pose_trans_std);
  synth->add_option("--noise-pose-rot-std", noise.pose_rot_std);
  synth->add_option("--noise-seed", noise_seed, "Defaults to --seed");
  synth->add_option("--out", synth_out)->required();

  // reproject
  auto* reproject = app.add_subcommand("reproject", "Dump the re-projected boundary stack of one view");
  SceneInput rp_in;
  std::string rp_target, rp_kind = "floor", rp_out, rp_interp = "great-circle";
  double rp_gap = 0.0;
  add_scene_input(reproject, rp_in);
  reproject->add_option("--target", rp_target, "Target frame id")->required();
  reproject->add_option("--kind", rp_kind)->check(CLI::IsMember({"floor", "ceiling"}));
  reproject->add_option("--gap-max", rp_gap, "Largest interpolated longitude gap (rad); 0 = 4 columns");
  reproject->add_option("--interp", rp_interp)->check(CLI::IsMember({"great-circle", "linear"}));
  reproject->add_option("--out", rp_out)->required();

  // pseudo-label
  auto* plabel = app.add_subcommand("pseudo-label", "Fuse pseudo-labels for every frame");
  SceneInput pl_in;
  std::string pl_estimator = "median", pl_kind = "floor", pl_out, pl_csv;
  double pl_sigma = kDefaultSigmaFloor, pl_fraction = 1.0;
  std::uint64_t pl_seed = 0;
  add_scene_input(plabel, pl_in);
  plabel->add_option("--estimator", pl_estimator)->check(CLI::IsMember({"median", "mean"}));
  plabel->add_option("--sigma-floor", pl_sigma);
  plabel->add_option("--view-fraction", pl_fraction);
  plabel->add_option("--seed", pl_seed, "View subsampling seed");
  plabel->add_option("--kind", pl_kind)->check(CLI::IsMember({"floor", "ceiling"}));
  plabel->add_option("--out", pl_out, "Scene JSON with a pseudo_labels block")->required();
  plabel->add_option("--out-csv", pl_csv);

  // metric
  auto* metric = app.add_subcommand("metric", "Entropy consistency score H_MLC");
  SceneInput m_in;
  GridArgs m_grid;
  std::string m_map, m_csv;
  add_scene_input(metric, m_in);
  add_grid_args(metric, m_grid);
  metric->add_option("--out-map", m_map, "PGM image of the density map");
  metric->add_option("--out", m_csv, "CSV of occupied cells");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Layout metrics against ground_truth");
  SceneInput e_in;
  std::size_t e_raster = kDefaultRaster;
  std::string e_out, e_csv;
  add_scene_input(evaluate_cmd, e_in);
  evaluate_cmd->add_option("--raster", e_raster);
  evaluate_cmd->add_option("--out", e_out, "Report JSON")->required();
  evaluate_cmd->add_option("--out-csv", e_csv);

  // refine
  auto* refine = app.add_subcommand("refine", "Consensus self-training with entropy early stopping");
  SceneInput r_in;
  TrainConfig cfg;
  std::string r_loss = "wbc", r_estimator = "median", r_traj, r_scene;
  add_scene_input(refine, r_in);
  refine->add_option("--iters", cfg.max_iters);
  refine->add_option("--lambda", cfg.damping);
  refine->add_option("--loss", r_loss)->check(CLI::IsMember({"wbc", "l1"}));
  refine->add_option("--estimator", r_estimator)->check(CLI::IsMember({"median", "mean"}));
  refine->add_option("--eval-every", cfg.eval_every);
  refine->add_option("--sigma-floor", cfg.sigma_floor);
  refine->add_option("--view-fraction", cfg.view_fraction);
  refine->add_option("--seed", cfg.seed);
  refine->add_option("--grid", cfg.grid, "Grid size (square)");
  refine->add_option("--padding", cfg.padding);
  refine->add_option("--raster", cfg.iou_raster, "Raster for IoU tracking against ground truth");
  refine->add_flag("--floor-only", cfg.floor_only_metric);
  refine->add_option("--out-traj", r_traj)->required();
  refine->add_option("--out-scene", r_scene)->required();

  // render-density
  auto* render = app.add_subcommand("render-density", "Render the top-view density map");
  SceneInput rd_in;
  GridArgs rd_grid;
  std::string rd_out;
  add_scene_input(render, rd_in);
  add_grid_args(render, rd_grid);
  render->add_option("--out", rd_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kUsage;
  }

  try {
    if (*synth) {
      RoomSpec spec = room == "square" ? square_room(size, h_floor, h_ceil)
                      : room == "lshape" ? lshape_room(size, h_floor, h_ceil)
                                         : ngon_room(sides, size / 2, h_floor, h_ceil);
      SynthOptions so;
      so.with_ceiling = !no_ceiling;
      Scene scene = generate_scene(spec, n_views, width, seed, so);
      noise.seed = noise_seed.value_or(seed);
      scene = perturb(scene, noise);
      io::save_scene(scene, synth_out);
    } else if (*reproject) {
      const Scene scene = load(rp_in, err);
      ResampleOptions ro;
      ro.gap_max = rp_gap;
      ro.method = parse_interp(rp_interp);
      const auto stack = build_stack(scene, scene.index_of(rp_target), parse_kind(rp_kind), {}, ro);
      write_stream(rp_out, [&](std::ostream& os) { io::write_stack_csv(stack, scene, os); });
    } else if (*plabel) {
      Scene scene = load(pl_in, err);
      PseudoLabelOptions po;
      po.kind = parse_kind(pl_kind);
      po.estimator = parse_estimator(pl_estimator);
      po.sigma_floor = pl_sigma;
      po.view_fraction = pl_fraction;
      po.seed = pl_seed;
      scene.pseudo_labels = scene_pseudo_labels(scene, po);
      io::save_scene(scene, pl_out);
      if (!pl_csv.empty())
        write_stream(pl_csv, [&](std::ostream& os) { io::write_pseudo_label_csv(*scene.pseudo_labels, os); });
    } else if (*metric) {
      const Scene scene = load(m_in, err);
      const DensityGrid grid = scene_density(scene, m_grid);
      const double h = mlc_entropy(grid);
      if (!m_map.empty()) render_density(grid, m_map);
      if (!m_csv.empty()) write_stream(m_csv, [&](std::ostream& os) { write_density_csv(grid, os); });
      out << "H_MLC=" << io::format_double(h) << '\n';
    } else if (*evaluate_cmd) {
      const Scene scene = load(e_in, err);
      if (!scene.ground_truth) throw ValidationError("evaluate needs a scene with ground_truth");
      const auto report = evaluate(scene.frames, *scene.ground_truth, {e_raster, true});
      io::write_text(e_out, io::report_json(report));
      if (!e_csv.empty()) write_stream(e_csv, [&](std::ostream& os) { io::write_report_csv(report, os); });
    } else if (*refine) {
      Scene scene = load(r_in, err);
      cfg.loss = parse_loss(r_loss);
      cfg.estimator = parse_estimator(r_estimator);
      const TrainResult result = run(scene, cfg);
      write_stream(r_traj, [&](std::ostream& os) { io::write_trajectory_csv(result.trajectory, os); });
      scene.frames = result.best_frames;
      scene.pseudo_labels.reset();
      io::save_scene(scene, r_scene);
    } else if (*render) {
      const Scene scene = load(rd_in, err);
      render_density(scene_density(scene, rd_grid), rd_out);
    }
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kInternal;
  }
  return kOk;
}

}  // namespace mlc::cli
