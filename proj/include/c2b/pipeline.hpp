#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "c2b/json_io.hpp"
#include "c2b/metrics.hpp"

namespace c2b {

struct FitOptions {
  AnchorBoneSet anchors = default_anchor_bones();
  MeasurementBands bands;
  LandmarkSemanticMap semantic_map = default_landmark_map();
  double temperature = 0.0;
  std::uint64_t seed = 0;
};

struct FitResult {
  double depth = 0.0;            // body depth from the anchor bones
  MeasurementVector observed;    // measurements assembled from the inputs
  ShapePosterior posterior;
  ShapeParams beta;              // shape actually used (posterior sample)
  Pose pose;
  JointSet joints;               // camera-space joints of the fitted pose
  Mesh mesh;
  std::optional<MetricReport> metrics;  // set when ground truth was present
};

// Full estimation pass over one scenario: depth from the anchor bones of the
// scenario skeleton, measurements from the lifted joints and landmarks,
// shape posterior, then IK over the back-projected joints on the fitted
// skeleton and skinning.
FitResult fit_scenario(const Scenario& scenario, const FitOptions& options = {});

// Writes pose.json, beta.json, translation.json, mesh.obj and report.json.
void write_fit_result(const FitResult& result, const std::string& out_dir);

struct SynthOptions {
  std::uint64_t seed = 0;
  int pose_db_size = 8;
  int joint_count = 24;
  int shape_dims = 10;
  int vertex_budget = 738;
  std::string category = "bodysuit";
  PerspectiveCamera camera;
};

struct SynthResult {
  Scenario scenario;
  PoseDatabase db;
};

// Builds a synthetic scenario with known ground truth: sampled shape, an
// upright camera-facing pose with articulated arms, exactly projected image
// joints, landmarks on the width bands, and a seeded pose database.
SynthResult synth_scenario(const SynthOptions& options = {});

// Writes model.json, skeleton.json, scenario.json and pose_db.jsonl.
void write_synth_result(const SynthResult& result, const std::string& out_dir);

struct EvolveOptions {
  int count = 1;
  int k = 5;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  FitOptions fit;
};

struct EvolveResult {
  FitResult fit;
  std::vector<Pose> variants;
  std::vector<Mesh> meshes;
};

// Fits the scenario, then transplants uncovered-joint rotations from the
// database neighbors and perturbs them, one skinned mesh per variant.
EvolveResult evolve_scenario(const Scenario& scenario, const PoseDatabase& db,
                             const EvolveOptions& options = {});

// Writes variant_###.pose.json and variant_###.obj per variant.
void write_evolve_result(const EvolveResult& result,
                         const std::string& out_dir);

// Metric report for a predicted pose and shape against the scenario's image
// joints and whatever ground truth it carries.
MetricReport evaluate_prediction(const Scenario& scenario,
                                 const Pose& pred_pose,
                                 const Eigen::VectorXd& pred_beta);

struct MeasureEdit {
  Measure which = Measure::height;
  double value = 0.0;  // meters, must be positive
};

// Parses "name=value" with a measurement name and a positive value.
MeasureEdit parse_measure_edit(const std::string& text);

struct MeasureResult {
  MeasurementVector base;    // measurements before edits
  MeasurementVector edited;  // measurements handed to the refit
  MeasurementVector refit;   // mesh measurements at the output shape
  ShapeParams beta;
};

// Measurement pass over a fitted scenario; edits replace observed entries
// and the shape posterior is refit. Without edits the fitted shape passes
// through unchanged.
MeasureResult measure_scenario(const Scenario& scenario,
                               const std::vector<MeasureEdit>& edits,
                               const FitOptions& options = {});

// Same editing flow starting from an explicit shape instead of a scenario.
MeasureResult measure_shape(const BodyModel& model, const ShapeParams& beta,
                            const std::vector<MeasureEdit>& edits,
                            const MeasurementBands& bands = {});

// Writes report.json and beta.json, plus mesh.obj when asked.
void write_measure_result(const MeasureResult& result, const BodyModel& model,
                          const std::string& out_dir, bool write_mesh);

}  // namespace c2b
