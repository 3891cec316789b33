#pragma once

#include <optional>
#include <string>
#include <vector>

#include "c2b/body_model.hpp"
#include "c2b/camera.hpp"
#include "c2b/evolution.hpp"
#include "c2b/kinematics.hpp"
#include "c2b/measurements.hpp"
#include "c2b/twist_swing.hpp"

namespace c2b {

// Landmark annotation as stored on disk: an image-plane pixel pair or a
// camera-space 3D point (projected by the pipeline before use).
struct LandmarkObservation {
  std::string name;
  Vec3 value = Vec3::Zero();  // pixel entries use x and y only
  bool is_pixel = true;
};

struct LandmarkFile {
  std::string category;
  std::vector<LandmarkObservation> points;
};

struct GroundTruth {
  std::optional<Pose> pose;
  std::optional<Eigen::VectorXd> beta;
  std::optional<Vec3> translation;

  bool any() const { return pose || beta || translation; }
};

// One fitting task: everything the estimation pipeline consumes, with the
// skeleton and body model loaded from the referenced files.
struct Scenario {
  PerspectiveCamera camera;
  std::string skeleton_ref;  // as written in the file
  std::string model_ref;
  KinematicTree tree;
  BodyModel model;
  ImageKeypoints image_joints;
  std::vector<double> depth_offsets;  // per joint, meters, default zeros
  TwistAngles twists;
  std::optional<LandmarkFile> landmarks;
  ClothMask cloth_mask;
  GroundTruth ground_truth;
};

struct MetricReport {
  std::optional<double> mpjpe_c_mm;
  std::optional<double> pa_mpjpe_c_mm;
  std::optional<double> kpe2d_px;
  std::optional<MeasurementVector> shape_errors_mm;
};

struct PipelineConfig {
  PerspectiveCamera camera;
  AnchorBoneSet anchors = default_anchor_bones();
  double covered_weight = 1.0;
  double uncovered_weight = 0.2;
  MeasurementBands bands;
  std::string landmark_map_path;  // empty selects the built-in map
};

KinematicTree load_tree(const std::string& path);
void save_tree(const KinematicTree& tree, const std::string& path);

Pose load_pose(const std::string& path);
void save_pose(const Pose& pose, const std::string& path);

TwistAngles load_twists(const std::string& path);
void save_twists(const TwistAngles& twists, const std::string& path);

PerspectiveCamera load_camera(const std::string& path);
void save_camera(const PerspectiveCamera& camera, const std::string& path);

ImageKeypoints load_keypoints(const std::string& path);
void save_keypoints(const ImageKeypoints& keypoints, const std::string& path);

LandmarkFile load_landmarks(const std::string& path);
void save_landmarks(const LandmarkFile& landmarks, const std::string& path);

LandmarkSemanticMap load_semantic_map(const std::string& path);
void save_semantic_map(const LandmarkSemanticMap& map,
                       const std::string& path);

BodyModel load_model(const std::string& path);
void save_model(const BodyModel& model, const std::string& path);

PoseDatabase load_pose_database(const std::string& path);
void save_pose_database(const PoseDatabase& db, const std::string& path);

Eigen::VectorXd load_shape_vector(const std::string& path);
void save_shape_vector(const Eigen::VectorXd& beta, const std::string& path);

Vec3 load_translation(const std::string& path);
void save_translation(const Vec3& translation, const std::string& path);

// Loads the scenario and the skeleton/model files it references (resolved
// relative to the scenario's directory), then checks joint counts agree.
Scenario load_scenario(const std::string& path);
// Writes the scenario JSON; referenced skeleton/model files are the
// caller's responsibility and are recorded as given in the refs.
void save_scenario(const Scenario& scenario, const std::string& path);

PipelineConfig load_config(const std::string& path);

void save_measurement_report(const MeasurementVector& measurements,
                             const std::string& path);
MeasurementVector load_measurement_report(const std::string& path);

// Summary written next to a fitted body: the body depth, the measurements
// assembled from the inputs (absent entries flagged), and the accuracy
// metrics when the scenario carried ground truth.
struct FitReport {
  double depth = 0.0;
  MeasurementVector measurements;
  std::optional<MetricReport> metrics;
};

void save_fit_report(const FitReport& report, const std::string& path);
FitReport load_fit_report(const std::string& path);

void save_metric_report_json(const MetricReport& report,
                             const std::string& path);
void save_metric_report_csv(const MetricReport& report,
                            const std::string& path);
MetricReport load_metric_report(const std::string& path);

}  // namespace c2b
