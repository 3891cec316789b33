#include "c2b/twist_swing.hpp"

#include <cmath>

#include "c2b/error.hpp"

namespace c2b {

TwistAngles TwistAngles::zero(int non_root_joints) {
  TwistAngles t;
  t.phi.assign(static_cast<std::size_t>(non_root_joints), 0.0);
  return t;
}

namespace {

Mat3 cross_matrix(const Vec3& v) {
  Mat3 k;
  k << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return k;
}

// Deterministic unit vector orthogonal to t, for the antiparallel fallback.
Vec3 orthogonal_axis(const Vec3& t) {
  Vec3 axis = t.cross(Vec3::UnitX());
  if (axis.norm() < 1e-6) axis = t.cross(Vec3::UnitY());
  return axis.normalized();
}

}  // namespace

Mat3 rodrigues(const Vec3& axis, double sin_alpha, double cos_alpha) {
  if (std::abs(axis.norm() - 1.0) > 1e-9)
    fail_input("rodrigues axis must have unit length");
  if (std::abs(sin_alpha * sin_alpha + cos_alpha * cos_alpha - 1.0) > 1e-9)
    fail_input("rodrigues (sin, cos) pair must lie on the unit circle");
  const Mat3 k = cross_matrix(axis);
  return Mat3::Identity() + sin_alpha * k + (1.0 - cos_alpha) * (k * k);
}

Mat3 swing_from_vectors(const Vec3& t, const Vec3& p) {
  const double nt = t.norm();
  const double np = p.norm();
  if (nt == 0.0 || np == 0.0)
    fail_numeric("swing is undefined for a zero-length bone vector");

  const Vec3 cross = t.cross(p);
  const double sin_alpha = cross.norm() / (nt * np);
  const double cos_alpha = t.dot(p) / (nt * np);

  if (sin_alpha < kParallelTol) {
    if (cos_alpha > 0.0) return Mat3::Identity();
    // antiparallel: 180 degrees about the documented fallback axis
    return rodrigues(orthogonal_axis(t), 0.0, -1.0);
  }
  return rodrigues(cross / cross.norm(), sin_alpha, cos_alpha);
}

Mat3 twist_rotation(const Vec3& t, double phi) {
  const double nt = t.norm();
  if (nt == 0.0) fail_numeric("twist axis must be a nonzero bone vector");
  return rodrigues(t / nt, std::sin(phi), std::cos(phi));
}

SwingTwist decompose_swing_twist(const Mat3& rotation, const Vec3& t) {
  SwingTwist st;
  st.swing = swing_from_vectors(t, rotation * t);
  st.twist = st.swing.transpose() * rotation;
  return st;
}

double twist_angle_about(const Mat3& rotation, const Vec3& t) {
  const SwingTwist st = decompose_swing_twist(rotation, t);
  const Vec3 axis = t.normalized();
  // angle of the twist factor about the bone axis, measured in a frame
  // orthogonal to it
  const Vec3 u = orthogonal_axis(axis);
  const Vec3 v = axis.cross(u);
  const Vec3 tu = st.twist * u;
  return std::atan2(tu.dot(v), tu.dot(u));
}

Pose solve_ik(const KinematicTree& tree, const JointSet& joints,
              const TwistAngles& twists, const Mat3& root_rotation) {
  const int n = tree.joint_count();
  if (joints.joint_count() != n)
    fail_input("IK joint set/skeleton joint count mismatch");
  if (twists.count() != n - 1)
    fail_input("IK expects " + std::to_string(n - 1) + " twist angles, got " +
               std::to_string(twists.count()));
  if (!is_rotation(root_rotation))
    fail_input("IK root rotation is not orthonormal with determinant +1");

  Pose pose;
  pose.rotations.resize(n);
  pose.rotations[0] = root_rotation;
  pose.root_translation = joints.positions[0];

  std::vector<Mat3> global(n);
  global[0] = root_rotation;
  for (int k = 1; k < n; ++k) {
    const int parent = tree.parent[k];
    const Vec3 target = joints.positions[k] - joints.positions[parent];
    if (target.norm() == 0.0)
      fail_numeric("coincident consecutive joints at '" + tree.name[k] +
                   "': target bone has zero length");
    const Vec3 p_local = global[parent].transpose() * target;
    const Vec3& t = tree.rest_offset[k];
    const Mat3 swing = swing_from_vectors(t, p_local);
    const Mat3 twist = twist_rotation(t, twists.phi[k - 1]);
    pose.rotations[k] = swing * twist;
    global[k] = global[parent] * pose.rotations[k];
  }
  return pose;
}

TwistAngles extract_twists(const KinematicTree& tree, const Pose& pose) {
  const int n = tree.joint_count();
  if (pose.joint_count() != n)
    fail_input("pose/skeleton joint count mismatch");
  TwistAngles twists;
  twists.phi.resize(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k)
    twists.phi[k - 1] = twist_angle_about(pose.rotations[k], tree.rest_offset[k]);
  return twists;
}

Mat3 fit_root_rotation(const KinematicTree& tree, const JointSet& joints) {
  if (joints.joint_count() != tree.joint_count())
    fail_input("joint set/skeleton joint count mismatch");
  const int root = tree.root();
  const int lhip = tree.index_of("left_hip");
  const int rhip = tree.index_of("right_hip");
  const int spine = tree.index_of("spine1");

  const Vec3 hip_rest = tree.rest_offset[lhip] - tree.rest_offset[rhip];
  const Vec3 spine_rest = tree.rest_offset[spine];
  const Vec3 n_rest = hip_rest.cross(spine_rest);

  const Vec3 hip_now = joints.positions[lhip] - joints.positions[rhip];
  const Vec3 spine_now = joints.positions[spine] - joints.positions[root];
  const Vec3 n_now = hip_now.cross(spine_now);
  if (n_rest.norm() == 0.0 || n_now.norm() == 0.0)
    fail_numeric("pelvis triangle is degenerate; cannot fit root rotation");

  const Mat3 align_normal = swing_from_vectors(n_rest, n_now);
  const Mat3 align_hips = swing_from_vectors(align_normal * hip_rest, hip_now);
  return align_hips * align_normal;
}

}  // namespace c2b
