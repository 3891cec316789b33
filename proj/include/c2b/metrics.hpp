#pragma once

#include <vector>

#include "c2b/body_model.hpp"
#include "c2b/kinematics.hpp"
#include "c2b/measurements.hpp"
#include "c2b/twist_swing.hpp"

namespace c2b {

struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

// Mean Euclidean joint error over cloth-covered joints, in millimeters.
double mpjpe_c(const JointSet& pred, const JointSet& gt, const ClothMask& mask);

// Least-squares similarity transform (reflection excluded) mapping the
// covered source joints onto the covered target joints.
SimilarityTransform procrustes_align(const JointSet& source,
                                     const JointSet& target,
                                     const ClothMask& mask);

// mpjpe_c after removing translation, rotation and scale via
// procrustes_align, in millimeters.
double pa_mpjpe_c(const JointSet& pred, const JointSet& gt,
                  const ClothMask& mask);

// Mean pixel distance over covered joints.
double kpe_2d(const std::vector<Vec2>& pred2d, const std::vector<Vec2>& gt2d,
              const ClothMask& mask);

// Weighted L1 keypoint loss: sum_k w_k |x_k - xhat_k|_1.
double keypoint_loss(const JointSet& pred, const JointSet& gt,
                     const std::vector<double>& weights);

// Weighted distance between twist angles embedded as (cos phi, sin phi),
// immune to 2 pi wrap-around.
double twist_loss(const TwistAngles& pred, const TwistAngles& gt,
                  const std::vector<double>& weights);

// Absolute per-measurement differences between the two shaped meshes, in
// millimeters; every entry present.
MeasurementVector shape_errors(const BodyModel& model,
                               const ShapeParams& pred_beta,
                               const ShapeParams& gt_beta);

}  // namespace c2b
