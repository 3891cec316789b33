#include "c2b/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <system_error>

#include "c2b/error.hpp"
#include "c2b/rng.hpp"

namespace c2b {
namespace {

JointSet rest_joint_positions(const KinematicTree& tree) {
  return forward_kinematics(tree, Pose::identity(tree.joint_count()));
}

// The gap between mesh height and skeleton height; rigid head and foot caps
// keep it shape-independent, so template shape suffices.
double height_calibration(const BodyModel& model,
                          const MeasurementBands& bands) {
  const ShapeParams zero = ShapeParams::zero(model.shape_dims());
  const MeasurementVector mesh = mesh_measurements(model, zero, bands);
  MeasurementVector skeleton;
  axial_measurements(model.tree, rest_joints(model, zero), &skeleton);
  return mesh[Measure::height] - skeleton[Measure::height];
}

Mat3 random_rotation(Rng& rng) {
  Vec3 axis;
  do {
    axis = Vec3(rng.normal(), rng.normal(), rng.normal());
  } while (axis.norm() < 1e-6);
  axis.normalize();
  return axis_angle_to_matrix(axis *
                              rng.uniform(-std::numbers::pi, std::numbers::pi));
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail_io("cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string pad3(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", i);
  return buf;
}

MeasurementVector apply_edits(MeasurementVector base,
                              const std::vector<MeasureEdit>& edits) {
  for (const MeasureEdit& edit : edits) {
    if (!(edit.value > 0.0))
      fail_input(std::string("edited measurement '") +
                 measure_name(edit.which) + "' must be positive");
    base.set(edit.which, edit.value);
  }
  return base;
}

// Tape-measure tolerance on edited entries. It bounds the shape response
// when an edit is nearly contradictory (say longer legs under a pinned
// height), which would otherwise explode along ill-conditioned directions.
constexpr double kEditTolerance = 0.01;

ShapeParams refit_shape(const BodyModel& model, const MeasurementVector& observed,
                        const MeasurementBands& bands,
                        const Eigen::VectorXd& prior_mean) {
  MeasurementModel mm = build_measurement_model(model, bands);
  mm.residual_cov += kEditTolerance * kEditTolerance *
                     Eigen::MatrixXd::Identity(kMeasureCount, kMeasureCount);
  const int dims = model.shape_dims();
  const ShapePosterior posterior = fit_shape(
      mm, observed, prior_mean, Eigen::MatrixXd::Identity(dims, dims));
  ShapeParams beta;
  beta.beta = posterior.mean;
  return beta;
}

}  // namespace

FitResult fit_scenario(const Scenario& scenario, const FitOptions& options) {
  const int n = scenario.tree.joint_count();
  if (scenario.image_joints.joint_count() != n)
    fail_input("scenario image joints do not match the skeleton joint count");
  std::vector<double> offsets = scenario.depth_offsets;
  if (offsets.empty())
    offsets.assign(static_cast<std::size_t>(n), 0.0);
  else if (static_cast<int>(offsets.size()) != n)
    fail_input("scenario depth offsets do not match the skeleton joint count");

  const JointSet rest = rest_joint_positions(scenario.tree);
  const double depth = adaptive_depth(scenario.camera, scenario.tree, rest,
                                      scenario.image_joints, options.anchors);

  JointSet lifted;
  lifted.positions.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    lifted.positions.push_back(back_project(
        scenario.camera, scenario.image_joints.pixels[static_cast<std::size_t>(k)],
        depth + offsets[static_cast<std::size_t>(k)]));

  MeasurementVector observed;
  axial_measurements(scenario.tree, lifted, &observed);
  observed.set(Measure::height,
               observed[Measure::height] +
                   height_calibration(scenario.model, options.bands));
  observed.set(
      Measure::shoulder_width,
      (lifted.positions[static_cast<std::size_t>(
           scenario.tree.index_of("left_shoulder"))] -
       lifted.positions[static_cast<std::size_t>(
           scenario.tree.index_of("right_shoulder"))])
          .norm());
  if (scenario.landmarks) {
    LandmarkSet set;
    for (const LandmarkObservation& obs : scenario.landmarks->points) {
      const Vec2 px = obs.is_pixel ? Vec2(obs.value.x(), obs.value.y())
                                   : project_point(scenario.camera, obs.value);
      set.points.push_back({obs.name, px});
    }
    radial_measurements(scenario.camera, set, options.semantic_map,
                        scenario.landmarks->category, depth, &observed);
  }

  const MeasurementModel mm =
      build_measurement_model(scenario.model, options.bands);
  const int dims = scenario.model.shape_dims();
  FitResult result;
  result.depth = depth;
  result.observed = observed;
  result.posterior = fit_shape(mm, observed, Eigen::VectorXd::Zero(dims),
                               Eigen::MatrixXd::Identity(dims, dims));
  result.beta = sample_shape(result.posterior, options.seed, options.temperature);

  const KinematicTree fitted = shaped_tree(scenario.model, result.beta);
  const Mat3 root = fit_root_rotation(fitted, lifted);
  result.pose = solve_ik(fitted, lifted, scenario.twists, root);
  result.joints = forward_kinematics(fitted, result.pose);
  result.mesh = skin(scenario.model, result.beta, result.pose);
  if (scenario.ground_truth.any())
    result.metrics = evaluate_prediction(scenario, result.pose,
                                         result.beta.beta);
  return result;
}

void write_fit_result(const FitResult& result, const std::string& out_dir) {
  ensure_directory(out_dir);
  save_pose(result.pose, join(out_dir, "pose.json"));
  save_shape_vector(result.beta.beta, join(out_dir, "beta.json"));
  save_translation(result.pose.root_translation,
                   join(out_dir, "translation.json"));
  export_obj(result.mesh, join(out_dir, "mesh.obj"));
  FitReport report;
  report.depth = result.depth;
  report.measurements = result.observed;
  report.metrics = result.metrics;
  save_fit_report(report, join(out_dir, "report.json"));
}

SynthResult synth_scenario(const SynthOptions& options) {
  if (options.pose_db_size < 1)
    fail_input("pose database size must be positive");
  BodyModel model =
      synth_body_model(options.joint_count, options.shape_dims,
                       options.vertex_budget, derive_seed(options.seed, "model"));
  const int dims = model.shape_dims();
  ShapeParams beta = ShapeParams::zero(dims);
  {
    Rng rng(derive_seed(options.seed, "shape"));
    for (int i = 0; i < dims && i < 8; ++i)
      beta.beta[i] = rng.uniform(-1.5, 1.5);
  }

  Scenario sc;
  sc.camera = options.camera;
  sc.skeleton_ref = "skeleton.json";
  sc.model_ref = "model.json";
  sc.tree = shaped_tree(model, beta);
  sc.model = std::move(model);
  const int n = sc.tree.joint_count();
  sc.cloth_mask = category_cloth_mask(sc.tree, options.category);

  Pose pose = Pose::identity(n);
  {
    Rng rng(derive_seed(options.seed, "placement"));
    pose.root_translation = Vec3(rng.uniform(-0.25, 0.25),
                                 rng.uniform(-0.15, 0.15),
                                 rng.uniform(2.5, 4.0));
  }
  {
    Rng rng(derive_seed(options.seed, "pose"));
    for (const char* name :
         {"left_elbow", "right_elbow", "left_wrist", "right_wrist",
          "left_hand", "right_hand"})
      pose.rotations[static_cast<std::size_t>(sc.tree.index_of(name))] =
          random_rotation(rng);
  }

  const JointSet joints = forward_kinematics(sc.tree, pose);
  sc.image_joints.pixels = project(sc.camera, joints.positions);
  sc.image_joints.visible.assign(static_cast<std::size_t>(n), true);
  const double root_depth = pose.root_translation.z();
  for (int k = 0; k < n; ++k)
    sc.depth_offsets.push_back(
        joints.positions[static_cast<std::size_t>(k)].z() - root_depth);
  sc.twists = extract_twists(sc.tree, pose);

  LandmarkFile lm;
  lm.category = options.category;
  const LandmarkSemanticMap map = default_landmark_map();
  const auto cat = map.categories.find(options.category);
  if (cat == map.categories.end())
    fail_input("clothing category '" + options.category +
               "' has no landmark semantics");
  const int left_shoulder = sc.tree.index_of("left_shoulder");
  const int right_shoulder = sc.tree.index_of("right_shoulder");
  for (const auto& [measurement, labels] : cat->second) {
    const Measure which = measure_from_name(measurement);
    Vec3 a, b;
    if (which == Measure::shoulder_width) {
      a = joints.positions[static_cast<std::size_t>(left_shoulder)];
      b = joints.positions[static_cast<std::size_t>(right_shoulder)];
    } else {
      const auto [left, right] = band_landmark_points(sc.model, beta, which);
      a = left + pose.root_translation;
      b = right + pose.root_translation;
    }
    const Vec2 pa = project_point(sc.camera, a);
    const Vec2 pb = project_point(sc.camera, b);
    lm.points.push_back({labels.first, Vec3(pa.x(), pa.y(), 0.0), true});
    lm.points.push_back({labels.second, Vec3(pb.x(), pb.y(), 0.0), true});
  }
  sc.landmarks = std::move(lm);

  sc.ground_truth.pose = pose;
  sc.ground_truth.beta = beta.beta;
  sc.ground_truth.translation = pose.root_translation;

  SynthResult result;
  result.scenario = std::move(sc);
  for (int i = 0; i < options.pose_db_size; ++i) {
    Rng rng(derive_seed(options.seed, "db", static_cast<std::uint64_t>(i)));
    Pose entry = Pose::identity(n);
    for (int k = 0; k < n; ++k)
      entry.rotations[static_cast<std::size_t>(k)] = random_rotation(rng);
    entry.root_translation = Vec3(rng.uniform(-1.0, 1.0),
                                  rng.uniform(-1.0, 1.0),
                                  rng.uniform(2.0, 4.0));
    result.db.entries.push_back({std::move(entry), "db_" + pad3(i)});
  }
  return result;
}

void write_synth_result(const SynthResult& result, const std::string& out_dir) {
  ensure_directory(out_dir);
  save_tree(result.scenario.tree, join(out_dir, "skeleton.json"));
  save_model(result.scenario.model, join(out_dir, "model.json"));
  save_scenario(result.scenario, join(out_dir, "scenario.json"));
  save_pose_database(result.db, join(out_dir, "pose_db.jsonl"));
}

EvolveResult evolve_scenario(const Scenario& scenario, const PoseDatabase& db,
                             const EvolveOptions& options) {
  EvolveResult result;
  result.fit = fit_scenario(scenario, options.fit);
  MutationConfig config;
  config.epsilon = options.epsilon;
  config.seed = options.seed;
  result.variants = generate_variants(db, result.fit.pose, scenario.cloth_mask,
                                      options.count, config, options.k);
  result.meshes.reserve(result.variants.size());
  for (const Pose& variant : result.variants)
    result.meshes.push_back(skin(scenario.model, result.fit.beta, variant));
  return result;
}

void write_evolve_result(const EvolveResult& result,
                         const std::string& out_dir) {
  ensure_directory(out_dir);
  for (std::size_t i = 0; i < result.variants.size(); ++i) {
    const std::string stem = "variant_" + pad3(static_cast<int>(i));
    save_pose(result.variants[i], join(out_dir, stem + ".pose.json"));
    export_obj(result.meshes[i], join(out_dir, stem + ".obj"));
  }
}

MetricReport evaluate_prediction(const Scenario& scenario,
                                 const Pose& pred_pose,
                                 const Eigen::VectorXd& pred_beta) {
  const int n = scenario.tree.joint_count();
  if (pred_pose.joint_count() != n)
    fail_input("predicted pose has " + std::to_string(pred_pose.joint_count()) +
               " joints, the scenario skeleton has " + std::to_string(n));
  if (static_cast<int>(pred_beta.size()) != scenario.model.shape_dims())
    fail_input("predicted shape has " + std::to_string(pred_beta.size()) +
               " dimensions, the model has " +
               std::to_string(scenario.model.shape_dims()));
  ShapeParams pred_shape;
  pred_shape.beta = pred_beta;
  const JointSet pred_joints =
      forward_kinematics(shaped_tree(scenario.model, pred_shape), pred_pose);

  MetricReport report;
  ClothMask visible_mask = scenario.cloth_mask;
  for (int k = 0; k < n; ++k)
    visible_mask.covered[static_cast<std::size_t>(k)] =
        visible_mask.covered[static_cast<std::size_t>(k)] &&
        scenario.image_joints.is_visible(k);
  report.kpe2d_px = kpe_2d(project(scenario.camera, pred_joints.positions),
                           scenario.image_joints.pixels, visible_mask);

  if (scenario.ground_truth.pose) {
    ShapeParams gt_shape = ShapeParams::zero(scenario.model.shape_dims());
    if (scenario.ground_truth.beta) gt_shape.beta = *scenario.ground_truth.beta;
    const JointSet gt_joints = forward_kinematics(
        shaped_tree(scenario.model, gt_shape), *scenario.ground_truth.pose);
    report.mpjpe_c_mm = mpjpe_c(pred_joints, gt_joints, scenario.cloth_mask);
    report.pa_mpjpe_c_mm =
        pa_mpjpe_c(pred_joints, gt_joints, scenario.cloth_mask);
  }
  if (scenario.ground_truth.beta) {
    ShapeParams gt_shape;
    gt_shape.beta = *scenario.ground_truth.beta;
    report.shape_errors_mm = shape_errors(scenario.model, pred_shape, gt_shape);
  }
  return report;
}

MeasureEdit parse_measure_edit(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    fail_input("measurement edit '" + text + "' is not of the form name=value");
  MeasureEdit edit;
  edit.which = measure_from_name(text.substr(0, eq));
  const std::string value = text.substr(eq + 1);
  double parsed = 0.0;
  const char* begin = value.c_str();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, parsed);
  if (ec != std::errc() || ptr != end)
    fail_input("measurement edit '" + text + "' has a malformed value");
  if (!(parsed > 0.0))
    fail_input("measurement edit '" + text + "' must be positive");
  edit.value = parsed;
  return edit;
}

MeasureResult measure_scenario(const Scenario& scenario,
                               const std::vector<MeasureEdit>& edits,
                               const FitOptions& options) {
  const FitResult fit = fit_scenario(scenario, options);
  MeasureResult result;
  result.base = fit.observed;
  if (edits.empty()) {
    result.edited = fit.observed;
    result.beta = fit.beta;
  } else {
    result.edited = apply_edits(fit.observed, edits);
    result.beta =
        refit_shape(scenario.model, result.edited, options.bands, fit.beta.beta);
  }
  result.refit = mesh_measurements(scenario.model, result.beta, options.bands);
  return result;
}

MeasureResult measure_shape(const BodyModel& model, const ShapeParams& beta,
                            const std::vector<MeasureEdit>& edits,
                            const MeasurementBands& bands) {
  if (beta.dims() != model.shape_dims())
    fail_input("shape vector size does not match the model shape dimensions");
  MeasureResult result;
  result.base = mesh_measurements(model, beta, bands);
  if (edits.empty()) {
    result.edited = result.base;
    result.beta = beta;
  } else {
    result.edited = apply_edits(result.base, edits);
    result.beta = refit_shape(model, result.edited, bands, beta.beta);
  }
  result.refit = mesh_measurements(model, result.beta, bands);
  return result;
}

void write_measure_result(const MeasureResult& result, const BodyModel& model,
                          const std::string& out_dir, bool write_mesh) {
  ensure_directory(out_dir);
  save_measurement_report(result.refit, join(out_dir, "report.json"));
  save_shape_vector(result.beta.beta, join(out_dir, "beta.json"));
  if (write_mesh)
    export_obj(shape_mesh(model, result.beta), join(out_dir, "mesh.obj"));
}

}  // namespace c2b
