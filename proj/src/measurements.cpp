#include "c2b/measurements.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

#include "c2b/error.hpp"
#include "c2b/rng.hpp"

namespace c2b {
namespace {

constexpr double kResidualFloor = 1e-6;  // meters, numerical noise floor

const std::array<const char*, kMeasureCount> kMeasureNames = {
    "height",         "chest_width", "waist_width", "hips_width",
    "shoulder_width", "leg_length",  "arm_span",    "torso_length"};

// An empty window widens to the nearest ring of vertices so extreme
// shapes still read the closest anatomical cross section.
std::pair<double, double> band_extent(const std::vector<Vec3>& verts,
                                      double center, double half) {
  const auto scan = [&](double reach) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Vec3& v : verts) {
      if (std::abs(v.y() - center) > reach) continue;
      lo = std::min(lo, v.x());
      hi = std::max(hi, v.x());
    }
    return std::pair(lo, hi);
  };
  auto [lo, hi] = scan(half);
  if (!(hi >= lo)) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Vec3& v : verts)
      nearest = std::min(nearest, std::abs(v.y() - center));
    std::tie(lo, hi) = scan(nearest * (1.0 + 1e-12));
  }
  if (!(hi >= lo))
    fail_numeric("mesh has no vertices to measure at height " +
                 std::to_string(center));
  return {lo, hi};
}

double band_width(const std::vector<Vec3>& verts, double center, double half) {
  const auto [lo, hi] = band_extent(verts, center, half);
  return hi - lo;
}

double path_length(const JointSet& joints, const KinematicTree& tree,
                   std::initializer_list<const char*> names) {
  double total = 0.0;
  const Vec3* prev = nullptr;
  for (const char* name : names) {
    const Vec3& p = joints.positions[tree.index_of(name)];
    if (prev) total += (p - *prev).norm();
    prev = &p;
  }
  return total;
}

}  // namespace

const char* measure_name(Measure m) {
  return kMeasureNames[static_cast<int>(m)];
}

Measure measure_from_name(const std::string& name) {
  for (int i = 0; i < kMeasureCount; ++i)
    if (name == kMeasureNames[i]) return static_cast<Measure>(i);
  std::string known;
  for (int i = 0; i < kMeasureCount; ++i) {
    if (i) known += ", ";
    known += kMeasureNames[i];
  }
  fail_input("unknown measurement '" + name + "' (known: " + known + ")");
}

int MeasurementVector::present_count() const {
  int n = 0;
  for (bool p : present) n += p ? 1 : 0;
  return n;
}

const LandmarkPoint* LandmarkSet::find(const std::string& name) const {
  for (const auto& p : points)
    if (p.name == name) return &p;
  return nullptr;
}

LandmarkSemanticMap default_landmark_map() {
  LandmarkSemanticMap map;
  auto& top = map.categories["short_sleeve_top"];
  top["shoulder_width"] = {"left_shoulder", "right_shoulder"};
  top["chest_width"] = {"left_chest", "right_chest"};
  top["waist_width"] = {"left_waist", "right_waist"};
  map.categories["long_sleeve_top"] = top;
  auto& shorts = map.categories["shorts"];
  shorts["waist_width"] = {"left_waist", "right_waist"};
  shorts["hips_width"] = {"left_hip", "right_hip"};
  map.categories["trousers"] = shorts;
  auto& suit = map.categories["bodysuit"];
  suit = top;
  suit["hips_width"] = {"left_hip", "right_hip"};
  return map;
}

void axial_measurements(const KinematicTree& tree, const JointSet& joints,
                        MeasurementVector* out) {
  if (joints.joint_count() != tree.joint_count())
    fail_input("joint set does not match the skeleton");
  double head_y = joints.positions[tree.index_of("head")].y();
  double ankles = 0.5 * (joints.positions[tree.index_of("left_ankle")].y() +
                         joints.positions[tree.index_of("right_ankle")].y());
  out->set(Measure::height, std::abs(head_y - ankles));

  double left_leg = path_length(joints, tree, {"left_hip", "left_knee",
                                               "left_ankle"});
  double right_leg = path_length(joints, tree, {"right_hip", "right_knee",
                                                "right_ankle"});
  out->set(Measure::leg_length, 0.5 * (left_leg + right_leg));

  out->set(Measure::arm_span,
           path_length(joints, tree,
                       {"left_hand", "left_wrist", "left_elbow",
                        "left_shoulder", "right_shoulder", "right_elbow",
                        "right_wrist", "right_hand"}));

  out->set(Measure::torso_length,
           path_length(joints, tree,
                       {"pelvis", "spine1", "spine2", "spine3", "neck"}));
}

MeasurementVector mesh_measurements(const BodyModel& model,
                                    const ShapeParams& beta,
                                    const MeasurementBands& bands) {
  Mesh mesh = shape_mesh(model, beta);
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (const Vec3& v : mesh.vertices) {
    y_min = std::min(y_min, v.y());
    y_max = std::max(y_max, v.y());
  }
  double height = y_max - y_min;
  if (height <= 0.0) fail_numeric("mesh has no vertical extent");

  JointSet joints = regress_joints(model, mesh);
  MeasurementVector out;
  axial_measurements(model.tree, joints, &out);
  out.set(Measure::height, height);  // mesh extent, not skeleton extent

  double half = bands.half_thickness * height;
  out.set(Measure::chest_width,
          band_width(mesh.vertices, y_min + bands.chest * height, half));
  out.set(Measure::waist_width,
          band_width(mesh.vertices, y_min + bands.waist * height, half));
  out.set(Measure::hips_width,
          band_width(mesh.vertices, y_min + bands.hips * height, half));
  out.set(Measure::shoulder_width,
          (joints.positions[model.tree.index_of("left_shoulder")] -
           joints.positions[model.tree.index_of("right_shoulder")])
              .norm());
  return out;
}

void radial_measurements(const PerspectiveCamera& camera,
                         const LandmarkSet& landmarks,
                         const LandmarkSemanticMap& semantic_map,
                         const std::string& category, double depth,
                         MeasurementVector* out) {
  if (depth <= 0.0) fail_numeric("radial measurements need positive depth");
  auto it = semantic_map.categories.find(category);
  if (it == semantic_map.categories.end()) {
    std::string known;
    for (const auto& [name, _] : semantic_map.categories) {
      if (!known.empty()) known += ", ";
      known += name;
    }
    fail_input("unknown clothing category '" + category +
               "' (known: " + known + ")");
  }
  for (const auto& [measure, pair] : it->second) {
    const LandmarkPoint* a = landmarks.find(pair.first);
    const LandmarkPoint* b = landmarks.find(pair.second);
    if (!a || !b) continue;  // landmark not annotated; entry stays absent
    double px = (a->pixel - b->pixel).norm();
    out->set(measure_from_name(measure), px * depth / camera.fx);
  }
}

std::pair<Vec3, Vec3> band_landmark_points(const BodyModel& model,
                                           const ShapeParams& beta,
                                           Measure which,
                                           const MeasurementBands& bands) {
  double fraction = 0.0;
  switch (which) {
    case Measure::chest_width:
      fraction = bands.chest;
      break;
    case Measure::waist_width:
      fraction = bands.waist;
      break;
    case Measure::hips_width:
      fraction = bands.hips;
      break;
    default:
      fail_input(std::string("measurement '") + measure_name(which) +
                 "' has no width band");
  }
  Mesh mesh = shape_mesh(model, beta);
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (const Vec3& v : mesh.vertices) {
    y_min = std::min(y_min, v.y());
    y_max = std::max(y_max, v.y());
  }
  double height = y_max - y_min;
  if (height <= 0.0) fail_numeric("mesh has no vertical extent");
  double center = y_min + fraction * height;
  double half = bands.half_thickness * height;
  const auto [lo, hi] = band_extent(mesh.vertices, center, half);
  return {Vec3(hi, center, 0.0), Vec3(lo, center, 0.0)};
}

ClothMask category_cloth_mask(const KinematicTree& tree,
                              const std::string& category) {
  static const std::vector<std::string> kTop = {
      "pelvis",        "spine1",         "spine2",        "spine3",
      "neck",          "left_collar",    "right_collar",  "left_shoulder",
      "right_shoulder"};
  static const std::vector<std::string> kArms = {
      "left_elbow", "right_elbow", "left_wrist", "right_wrist"};
  static const std::vector<std::string> kShorts = {
      "pelvis", "left_hip", "right_hip", "left_knee", "right_knee"};
  static const std::vector<std::string> kAnkles = {"left_ankle",
                                                   "right_ankle"};

  std::vector<std::string> covered;
  auto add = [&covered](const std::vector<std::string>& names) {
    covered.insert(covered.end(), names.begin(), names.end());
  };
  if (category == "short_sleeve_top") {
    add(kTop);
  } else if (category == "long_sleeve_top") {
    add(kTop);
    add(kArms);
  } else if (category == "shorts") {
    add(kShorts);
  } else if (category == "trousers") {
    add(kShorts);
    add(kAnkles);
  } else if (category == "bodysuit") {
    add(kTop);
    add(kArms);
    add(kShorts);
    add(kAnkles);
  } else {
    std::string known;
    for (const auto& [name, _] : default_landmark_map().categories) {
      if (!known.empty()) known += ", ";
      known += name;
    }
    fail_input("unknown clothing category '" + category +
               "' (known: " + known + ")");
  }

  ClothMask mask;
  mask.covered.assign(static_cast<std::size_t>(tree.joint_count()), false);
  for (const std::string& name : covered)
    mask.covered[static_cast<std::size_t>(tree.index_of(name))] = true;
  return mask;
}

MeasurementVector MeasurementModel::predict(const Eigen::VectorXd& beta) const {
  if (beta.size() != A.cols())
    fail_input("shape parameter count does not match the measurement model");
  Eigen::VectorXd v = A * beta + b;
  MeasurementVector out;
  for (int i = 0; i < kMeasureCount; ++i)
    out.set(static_cast<Measure>(i), v[i]);
  return out;
}

MeasurementModel build_measurement_model(const BodyModel& model,
                                         const MeasurementBands& bands,
                                         int samples, std::uint64_t seed) {
  const int m = model.shape_dims();
  if (samples < m + 2)
    fail_input("need at least shape_dims + 2 samples to fit the model");

  Eigen::MatrixXd design(samples, m + 1);
  Eigen::MatrixXd targets(samples, kMeasureCount);
  Rng rng(derive_seed(seed, "measurement-model", 0));
  for (int s = 0; s < samples; ++s) {
    ShapeParams beta = ShapeParams::zero(m);
    for (int d = 0; d < m; ++d) beta.beta[d] = rng.uniform(-2.0, 2.0);
    design.row(s).head(m) = beta.beta.transpose();
    design(s, m) = 1.0;
    MeasurementVector omega = mesh_measurements(model, beta, bands);
    targets.row(s) = omega.value.transpose();
  }

  Eigen::MatrixXd coef =
      design.colPivHouseholderQr().solve(targets);  // (m+1) x 8
  MeasurementModel out;
  out.A = coef.topRows(m).transpose();
  out.b = coef.row(m).transpose();

  Eigen::MatrixXd resid = targets - design * coef;
  out.residual_cov =
      resid.transpose() * resid / std::max(1, samples - m - 1);
  return out;
}

ShapePosterior fit_shape(const MeasurementModel& model,
                         const MeasurementVector& observed,
                         const Eigen::VectorXd& prior_mean,
                         const Eigen::MatrixXd& prior_cov) {
  const int m = model.shape_dims();
  if (prior_mean.size() != m || prior_cov.rows() != m || prior_cov.cols() != m)
    fail_input("prior dimensions do not match the measurement model");
  if ((prior_cov - prior_cov.transpose()).norm() > 1e-9 * (1.0 + prior_cov.norm()))
    fail_input("prior covariance must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> prior_eig(prior_cov);
  if (prior_eig.eigenvalues().minCoeff() < -1e-9)
    fail_input("prior covariance must be positive semidefinite");

  // inverse square root of the prior, eigenvalues floored for stability
  Eigen::VectorXd pl = prior_eig.eigenvalues().cwiseMax(1e-18);
  Eigen::MatrixXd prior_isqrt = prior_eig.eigenvectors() *
                                pl.cwiseSqrt().cwiseInverse().asDiagonal() *
                                prior_eig.eigenvectors().transpose();

  const int o = observed.present_count();
  Eigen::MatrixXd stacked(o + m, m);
  Eigen::VectorXd rhs(o + m);
  if (o > 0) {
    Eigen::MatrixXd a_obs(o, m);
    Eigen::VectorXd y_obs(o);
    std::vector<int> rows;
    for (int i = 0; i < kMeasureCount; ++i)
      if (observed.present[i]) rows.push_back(i);
    Eigen::MatrixXd sigma(o, o);
    for (int r = 0; r < o; ++r) {
      a_obs.row(r) = model.A.row(rows[r]);
      y_obs[r] = observed.value[rows[r]] - model.b[rows[r]];
      for (int c = 0; c < o; ++c)
        sigma(r, c) = model.residual_cov(rows[r], rows[c]);
    }
    sigma.diagonal().array() += kResidualFloor * kResidualFloor;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sig_eig(sigma);
    Eigen::VectorXd sl =
        sig_eig.eigenvalues().cwiseMax(kResidualFloor * kResidualFloor);
    Eigen::MatrixXd whiten = sig_eig.eigenvectors() *
                             sl.cwiseSqrt().cwiseInverse().asDiagonal() *
                             sig_eig.eigenvectors().transpose();
    stacked.topRows(o) = whiten * a_obs;
    rhs.head(o) = whiten * y_obs;
  }
  stacked.bottomRows(m) = prior_isqrt;
  rhs.tail(m) = prior_isqrt * prior_mean;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  ShapePosterior post;
  post.mean = qr.solve(rhs);

  // covariance = (S^T S)^{-1} from the R factor of S
  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(m, m);
  Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(m, m));
  Eigen::MatrixXd perm = qr.colsPermutation();
  post.cov = perm * r_inv * r_inv.transpose() * perm.transpose();
  post.cov = 0.5 * (post.cov + post.cov.transpose());
  return post;
}

ShapeParams sample_shape(const ShapePosterior& posterior, std::uint64_t seed,
                         double temperature) {
  if (temperature < 0.0) fail_input("temperature must be nonnegative");
  const int m = static_cast<int>(posterior.mean.size());
  ShapeParams out = ShapeParams::zero(m);
  out.beta = posterior.mean;
  if (temperature == 0.0) return out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(posterior.cov);
  if (eig.eigenvalues().minCoeff() < -1e-9)
    fail_numeric("posterior covariance is not positive semidefinite");
  Eigen::VectorXd l = eig.eigenvalues().cwiseMax(0.0);
  Rng rng(derive_seed(seed, "shape-sample", 0));
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z[i] = rng.normal();
  out.beta += temperature * (eig.eigenvectors() *
                             l.cwiseSqrt().asDiagonal() * z);
  return out;
}

}  // namespace c2b
