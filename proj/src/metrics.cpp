#include "c2b/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "c2b/error.hpp"

namespace c2b {
namespace {

constexpr double kMetersToMm = 1000.0;

std::vector<int> covered_indices(const ClothMask& mask) {
  std::vector<int> out;
  for (int k = 0; k < mask.joint_count(); ++k)
    if (mask.covered[k]) out.push_back(k);
  return out;
}

}  // namespace

double mpjpe_c(const JointSet& pred, const JointSet& gt,
               const ClothMask& mask) {
  if (pred.joint_count() != gt.joint_count() ||
      pred.joint_count() != mask.joint_count())
    fail_input("joint error needs matching joint counts");
  std::vector<int> covered = covered_indices(mask);
  if (covered.empty()) fail_input("no covered joints to evaluate");
  double total = 0.0;
  for (int k : covered)
    total += (pred.positions[k] - gt.positions[k]).norm();
  return kMetersToMm * total / static_cast<double>(covered.size());
}

SimilarityTransform procrustes_align(const JointSet& source,
                                     const JointSet& target,
                                     const ClothMask& mask) {
  if (source.joint_count() != target.joint_count() ||
      source.joint_count() != mask.joint_count())
    fail_input("alignment needs matching joint counts");
  std::vector<int> covered = covered_indices(mask);
  const int n = static_cast<int>(covered.size());
  if (n < 3) fail_input("alignment needs at least 3 covered joints");

  Vec3 mu_s = Vec3::Zero(), mu_t = Vec3::Zero();
  for (int k : covered) {
    mu_s += source.positions[k];
    mu_t += target.positions[k];
  }
  mu_s /= n;
  mu_t /= n;

  Mat3 cross = Mat3::Zero();
  double var_s = 0.0;
  for (int k : covered) {
    Vec3 s = source.positions[k] - mu_s;
    Vec3 t = target.positions[k] - mu_t;
    cross += t * s.transpose();
    var_s += s.squaredNorm();
  }
  cross /= n;
  var_s /= n;

  Eigen::JacobiSVD<Mat3> svd(cross,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 d = svd.singularValues();
  if (d[1] <= 1e-12 * std::max(1.0, d[0]))
    fail_numeric("covered joints are too degenerate to align");

  Vec3 signs(1.0, 1.0, 1.0);
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0)
    signs[2] = -1.0;

  SimilarityTransform out;
  out.rotation =
      svd.matrixU() * signs.asDiagonal() * svd.matrixV().transpose();
  out.scale = d.dot(signs) / var_s;
  if (!(out.scale > 0.0))
    fail_numeric("alignment collapsed to a nonpositive scale");
  out.translation = mu_t - out.scale * (out.rotation * mu_s);
  return out;
}

double pa_mpjpe_c(const JointSet& pred, const JointSet& gt,
                  const ClothMask& mask) {
  SimilarityTransform align = procrustes_align(pred, gt, mask);
  JointSet mapped = pred;
  for (int k = 0; k < pred.joint_count(); ++k)
    mapped.positions[k] = align.apply(pred.positions[k]);
  return mpjpe_c(mapped, gt, mask);
}

double kpe_2d(const std::vector<Vec2>& pred2d, const std::vector<Vec2>& gt2d,
              const ClothMask& mask) {
  if (pred2d.size() != gt2d.size() ||
      static_cast<int>(pred2d.size()) != mask.joint_count())
    fail_input("keypoint error needs matching joint counts");
  std::vector<int> covered = covered_indices(mask);
  if (covered.empty()) fail_input("no covered joints to evaluate");
  double total = 0.0;
  for (int k : covered) total += (pred2d[k] - gt2d[k]).norm();
  return total / static_cast<double>(covered.size());
}

double keypoint_loss(const JointSet& pred, const JointSet& gt,
                     const std::vector<double>& weights) {
  if (pred.joint_count() != gt.joint_count() ||
      static_cast<int>(weights.size()) != pred.joint_count())
    fail_input("keypoint loss needs matching joint and weight counts");
  double total = 0.0;
  for (int k = 0; k < pred.joint_count(); ++k) {
    if (weights[k] < 0.0) fail_input("keypoint loss weights must be nonnegative");
    total +=
        weights[k] * (pred.positions[k] - gt.positions[k]).lpNorm<1>();
  }
  return total;
}

double twist_loss(const TwistAngles& pred, const TwistAngles& gt,
                  const std::vector<double>& weights) {
  if (pred.count() != gt.count() ||
      static_cast<int>(weights.size()) != pred.count())
    fail_input("twist loss needs matching twist and weight counts");
  double total = 0.0;
  for (int k = 0; k < pred.count(); ++k) {
    if (weights[k] < 0.0) fail_input("twist loss weights must be nonnegative");
    double dc = std::cos(pred.phi[k]) - std::cos(gt.phi[k]);
    double ds = std::sin(pred.phi[k]) - std::sin(gt.phi[k]);
    total += weights[k] * std::sqrt(dc * dc + ds * ds);
  }
  return total;
}

MeasurementVector shape_errors(const BodyModel& model,
                               const ShapeParams& pred_beta,
                               const ShapeParams& gt_beta) {
  if (pred_beta.dims() != gt_beta.dims())
    fail_input("shape error needs matching shape dimensions");
  MeasurementVector pred = mesh_measurements(model, pred_beta);
  MeasurementVector gt = mesh_measurements(model, gt_beta);
  MeasurementVector out;
  for (int i = 0; i < kMeasureCount; ++i)
    out.set(static_cast<Measure>(i),
            kMetersToMm * std::abs(pred.value[i] - gt.value[i]));
  return out;
}

}  // namespace c2b
