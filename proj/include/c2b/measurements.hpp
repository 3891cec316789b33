#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "c2b/body_model.hpp"
#include "c2b/camera.hpp"

namespace c2b {

// Canonical anthropometric measurements, all in meters, fixed order.
enum class Measure {
  height = 0,
  chest_width,
  waist_width,
  hips_width,
  shoulder_width,
  leg_length,
  arm_span,
  torso_length,
};
constexpr int kMeasureCount = 8;

const char* measure_name(Measure m);
Measure measure_from_name(const std::string& name);

struct MeasurementVector {
  Eigen::Matrix<double, kMeasureCount, 1> value =
      Eigen::Matrix<double, kMeasureCount, 1>::Zero();
  std::array<bool, kMeasureCount> present{};

  double& operator[](Measure m) { return value[static_cast<int>(m)]; }
  double operator[](Measure m) const { return value[static_cast<int>(m)]; }
  void set(Measure m, double v) {
    value[static_cast<int>(m)] = v;
    present[static_cast<int>(m)] = true;
  }
  bool has(Measure m) const { return present[static_cast<int>(m)]; }
  int present_count() const;
};

// Horizontal vertex bands used for width measurements, as fractions of the
// mesh height measured from the lowest vertex.
struct MeasurementBands {
  double chest = 0.72;
  double waist = 0.60;
  double hips = 0.52;
  double half_thickness = 0.02;
};

struct LandmarkPoint {
  std::string name;
  Vec2 pixel;
};

struct LandmarkSet {
  std::vector<LandmarkPoint> points;

  const LandmarkPoint* find(const std::string& name) const;
};

// Which landmark pairs measure what, per clothing category.
struct LandmarkSemanticMap {
  // category -> measurement name -> (landmark a, landmark b)
  std::map<std::string,
           std::map<std::string, std::pair<std::string, std::string>>>
      categories;
};

LandmarkSemanticMap default_landmark_map();

// Widths from band extents plus shoulder width and path lengths from the
// regressed joints; height is the vertical mesh extent. Every entry present.
MeasurementVector mesh_measurements(const BodyModel& model,
                                    const ShapeParams& beta,
                                    const MeasurementBands& bands = {});

// Pose-invariant entries computable from a rest-pose skeleton: height as
// head-to-mean-ankle vertical extent, leg length, arm span, torso length.
// Requires the default joint names.
void axial_measurements(const KinematicTree& tree, const JointSet& joints,
                        MeasurementVector* out);

// Widths from landmark pixel distances back-projected at the body depth.
// Pairs whose landmarks are missing from the set are left absent.
void radial_measurements(const PerspectiveCamera& camera,
                         const LandmarkSet& landmarks,
                         const LandmarkSemanticMap& semantic_map,
                         const std::string& category, double depth,
                         MeasurementVector* out);

// The two clothing landmark points of a width band on the shaped rest mesh:
// (max x, band center, 0) then (min x, band center, 0). Only the chest,
// waist and hips widths have bands.
std::pair<Vec3, Vec3> band_landmark_points(const BodyModel& model,
                                           const ShapeParams& beta,
                                           Measure which,
                                           const MeasurementBands& bands = {});

// Joints covered by a clothing category, on the default joint names.
ClothMask category_cloth_mask(const KinematicTree& tree,
                              const std::string& category);

// Affine measurement model omega ~ A beta + b with Gaussian residuals,
// regressed from seeded shape samples of a body model.
struct MeasurementModel {
  Eigen::MatrixXd A;             // kMeasureCount x shape_dims
  Eigen::VectorXd b;             // kMeasureCount
  Eigen::MatrixXd residual_cov;  // kMeasureCount x kMeasureCount

  int shape_dims() const { return static_cast<int>(A.cols()); }
  MeasurementVector predict(const Eigen::VectorXd& beta) const;
};

MeasurementModel build_measurement_model(const BodyModel& model,
                                         const MeasurementBands& bands = {},
                                         int samples = 64,
                                         std::uint64_t seed = 0x5eed);

struct ShapePosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Gaussian posterior over shape given the observed measurement entries,
// conjugate update of the Gaussian prior through the affine model.
ShapePosterior fit_shape(const MeasurementModel& model,
                         const MeasurementVector& observed,
                         const Eigen::VectorXd& prior_mean,
                         const Eigen::MatrixXd& prior_cov);

// mean + temperature * L z with L the symmetric PSD square root of the
// covariance and z a seeded standard normal draw.
ShapeParams sample_shape(const ShapePosterior& posterior, std::uint64_t seed,
                         double temperature);

}  // namespace c2b
