#include "c2b/kinematics.hpp"

#include <cmath>

#include "c2b/error.hpp"

namespace c2b {

int KinematicTree::index_of(const std::string& joint_name) const {
  if (auto idx = find(joint_name)) return *idx;
  fail_input("joint '" + joint_name + "' not present in skeleton");
}

std::optional<int> KinematicTree::find(const std::string& joint_name) const {
  for (int i = 0; i < joint_count(); ++i)
    if (name[i] == joint_name) return i;
  return std::nullopt;
}

Pose Pose::identity(int joints) {
  Pose p;
  p.rotations.assign(joints, Mat3::Identity());
  return p;
}

int ClothMask::covered_count() const {
  int n = 0;
  for (bool c : covered) n += c ? 1 : 0;
  return n;
}

KinematicTree build_tree(const std::vector<int>& parents,
                         const std::vector<Vec3>& rest_offsets,
                         const std::vector<std::string>& names) {
  const int n = static_cast<int>(parents.size());
  if (n == 0) fail_input("skeleton must have at least one joint");
  if (rest_offsets.size() != parents.size() || names.size() != parents.size())
    fail_input("skeleton joint lists have mismatched lengths");

  int roots = 0;
  for (int k = 0; k < n; ++k) {
    const int p = parents[k];
    if (p == kRootParent) {
      ++roots;
      if (k != 0)
        fail_input("root must be joint 0, found root at joint " +
                   std::to_string(k) + " ('" + names[k] + "')");
      continue;
    }
    if (p < 0 || p >= n)
      fail_input("joint " + std::to_string(k) + " ('" + names[k] +
                 "') has out-of-range parent " + std::to_string(p));
    // parent >= k would be a forward reference: either a cycle or an
    // unsorted hierarchy, both rejected
    if (p >= k)
      fail_input("joint " + std::to_string(k) + " ('" + names[k] +
                 "') violates topological order (parent " + std::to_string(p) +
                 ")");
    if (rest_offsets[k].norm() <= 0.0)
      fail_input("joint " + std::to_string(k) + " ('" + names[k] +
                 "') has a zero-length rest bone");
  }
  if (roots == 0) fail_input("skeleton has no root joint");
  if (roots > 1) fail_input("skeleton has multiple roots");

  KinematicTree tree;
  tree.parent = parents;
  tree.rest_offset = rest_offsets;
  tree.rest_offset[0] = Vec3::Zero();
  tree.name = names;
  return tree;
}

bool is_rotation(const Mat3& r, double tol) {
  const Mat3 rtr = r.transpose() * r;
  return (rtr - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

void validate_pose(const KinematicTree& tree, const Pose& pose, double tol) {
  if (pose.joint_count() != tree.joint_count())
    fail_input("pose has " + std::to_string(pose.joint_count()) +
               " rotations, skeleton has " + std::to_string(tree.joint_count()) +
               " joints");
  for (int k = 0; k < pose.joint_count(); ++k)
    if (!is_rotation(pose.rotations[k], tol))
      fail_input("pose rotation " + std::to_string(k) +
                 " is not orthonormal with determinant +1");
}

std::vector<Mat3> global_rotations(const KinematicTree& tree,
                                   const Pose& pose) {
  if (pose.joint_count() != tree.joint_count())
    fail_input("pose/skeleton joint count mismatch");
  std::vector<Mat3> global(tree.joint_count());
  global[0] = pose.rotations[0];
  for (int k = 1; k < tree.joint_count(); ++k)
    global[k] = global[tree.parent[k]] * pose.rotations[k];
  return global;
}

JointSet forward_kinematics(const KinematicTree& tree, const Pose& pose) {
  const std::vector<Mat3> global = global_rotations(tree, pose);
  JointSet joints;
  joints.positions.resize(tree.joint_count());
  joints.positions[0] = pose.root_translation;
  for (int k = 1; k < tree.joint_count(); ++k)
    joints.positions[k] =
        joints.positions[tree.parent[k]] + global[k] * tree.rest_offset[k];
  return joints;
}

std::vector<Vec3> bone_vectors(const KinematicTree& tree,
                               const JointSet& joints) {
  if (joints.joint_count() != tree.joint_count())
    fail_input("joint set/skeleton joint count mismatch");
  std::vector<Vec3> bones;
  bones.reserve(tree.joint_count() - 1);
  for (int k = 1; k < tree.joint_count(); ++k)
    bones.push_back(joints.positions[k] - joints.positions[tree.parent[k]]);
  return bones;
}

KinematicTree default_tree() {
  // SMPL-style hierarchy; offsets give a ~1.6 m standing T-pose figure with
  // the pelvis at the origin, legs along -y, arms along +-x, toes along +z.
  struct J {
    const char* name;
    int parent;
    Vec3 offset;
  };
  static const J layout[] = {
      {"pelvis", kRootParent, {0.0, 0.0, 0.0}},
      {"left_hip", 0, {0.09, -0.07, 0.0}},
      {"right_hip", 0, {-0.09, -0.07, 0.0}},
      {"spine1", 0, {0.0, 0.12, 0.0}},
      {"left_knee", 1, {0.0, -0.38, 0.0}},
      {"right_knee", 2, {0.0, -0.38, 0.0}},
      {"spine2", 3, {0.0, 0.12, 0.0}},
      {"left_ankle", 4, {0.0, -0.40, 0.0}},
      {"right_ankle", 5, {0.0, -0.40, 0.0}},
      {"spine3", 6, {0.0, 0.12, 0.0}},
      {"left_foot", 7, {0.0, -0.04, 0.11}},
      {"right_foot", 8, {0.0, -0.04, 0.11}},
      {"neck", 9, {0.0, 0.12, 0.0}},
      {"left_collar", 9, {0.07, 0.06, 0.0}},
      {"right_collar", 9, {-0.07, 0.06, 0.0}},
      {"head", 12, {0.0, 0.24, 0.0}},
      {"left_shoulder", 13, {0.095, 0.0, 0.0}},
      {"right_shoulder", 14, {-0.095, 0.0, 0.0}},
      {"left_elbow", 16, {0.27, 0.0, 0.0}},
      {"right_elbow", 17, {-0.27, 0.0, 0.0}},
      {"left_wrist", 18, {0.25, 0.0, 0.0}},
      {"right_wrist", 19, {-0.25, 0.0, 0.0}},
      {"left_hand", 20, {0.085, 0.0, 0.0}},
      {"right_hand", 21, {-0.085, 0.0, 0.0}},
  };
  std::vector<int> parents;
  std::vector<Vec3> offsets;
  std::vector<std::string> names;
  for (const J& j : layout) {
    names.emplace_back(j.name);
    parents.push_back(j.parent);
    offsets.push_back(j.offset);
  }
  return build_tree(parents, offsets, names);
}

Mat3 axis_angle_to_matrix(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle < 1e-12) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

Vec3 matrix_to_axis_angle(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

Mat3 quaternion_to_matrix(double w, double x, double y, double z) {
  Eigen::Quaterniond q(w, x, y, z);
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace c2b
