#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace c2b {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

constexpr int kRootParent = -1;

// Articulated joint hierarchy with rest-pose bone offsets. Joints are stored
// in topological order: parent[k] < k for every non-root joint, exactly one
// root (parent == kRootParent). rest_offset[k] is the bone from parent to
// joint k in the rest pose, meters; rest_offset[root] is unused and zero.
struct KinematicTree {
  std::vector<int> parent;
  std::vector<Vec3> rest_offset;
  std::vector<std::string> name;

  int joint_count() const { return static_cast<int>(parent.size()); }
  int root() const { return 0; }

  // index of a joint by name, or fails naming the missing joint
  int index_of(const std::string& joint_name) const;
  std::optional<int> find(const std::string& joint_name) const;
};

// Per-joint rotation relative to the parent frame plus the root position.
// The rotation stored at joint k orients the bone leading into k, so the
// accumulated rotation root..k applies to rest_offset[k].
struct Pose {
  std::vector<Mat3> rotations;
  Vec3 root_translation = Vec3::Zero();

  int joint_count() const { return static_cast<int>(rotations.size()); }

  static Pose identity(int joints);
};

struct JointSet {
  std::vector<Vec3> positions;

  int joint_count() const { return static_cast<int>(positions.size()); }
};

// Partition of joints into clothing-covered (true) and uncovered area.
struct ClothMask {
  std::vector<bool> covered;

  int joint_count() const { return static_cast<int>(covered.size()); }
  int covered_count() const;
};

KinematicTree build_tree(const std::vector<int>& parents,
                         const std::vector<Vec3>& rest_offsets,
                         const std::vector<std::string>& names);

// Validates a pose against a tree: joint counts match, every rotation is in
// SO(3) within tol.
void validate_pose(const KinematicTree& tree, const Pose& pose,
                   double tol = 1e-9);

JointSet forward_kinematics(const KinematicTree& tree, const Pose& pose);

// Accumulated root..k rotations for every joint, same traversal as FK.
std::vector<Mat3> global_rotations(const KinematicTree& tree, const Pose& pose);

// One vector per non-root joint: positions[k] - positions[parent[k]],
// indexed by k-1.
std::vector<Vec3> bone_vectors(const KinematicTree& tree,
                               const JointSet& joints);

// The default 24-joint SMPL-like layout (pelvis root, y up, +x body left).
KinematicTree default_tree();

// Rotation helpers; matrices are the stored form throughout.
Mat3 axis_angle_to_matrix(const Vec3& axis_angle);
Vec3 matrix_to_axis_angle(const Mat3& r);
Mat3 quaternion_to_matrix(double w, double x, double y, double z);
bool is_rotation(const Mat3& r, double tol = 1e-9);

}  // namespace c2b
