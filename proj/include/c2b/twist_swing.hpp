#pragma once

#include "c2b/kinematics.hpp"

namespace c2b {

// Twist angle per non-root joint, about that joint's rest bone axis.
// phi[k-1] belongs to joint k; range (-pi, pi].
struct TwistAngles {
  std::vector<double> phi;

  int count() const { return static_cast<int>(phi.size()); }
  static TwistAngles zero(int non_root_joints);
};

struct SwingTwist {
  Mat3 swing;
  Mat3 twist;
};

// Relative cross-product magnitude below which two directions are treated
// as parallel or antiparallel.
constexpr double kParallelTol = 1e-8;

// R = I + sin(a) K + (1 - cos(a)) K^2, K the cross-product matrix of axis.
// axis must be unit length; (sin_alpha, cos_alpha) must lie on the unit
// circle, both within 1e-9.
Mat3 rodrigues(const Vec3& axis, double sin_alpha, double cos_alpha);

// Minimal rotation mapping direction t onto direction p, axis (t x p)/|t x p|.
// Parallel inputs give identity; antiparallel inputs give a 180-degree turn
// about a deterministic axis orthogonal to t (t x e1 unless near-parallel to
// e1, then t x e2).
Mat3 swing_from_vectors(const Vec3& t, const Vec3& p);

// Rotation of angle phi about the direction of t.
Mat3 twist_rotation(const Vec3& t, double phi);

// Splits a rotation into swing * twist about the rest bone direction t.
SwingTwist decompose_swing_twist(const Mat3& rotation, const Vec3& t);

// Signed twist angle of `rotation` about the direction of t, in (-pi, pi].
double twist_angle_about(const Mat3& rotation, const Vec3& t);

// Analytic IK: per joint, target bone expressed in the parent's current
// global frame, local rotation = swing(rest bone -> target bone) * twist.
// The returned pose reproduces the input bone directions under FK; bone
// lengths follow the tree's rest offsets.
Pose solve_ik(const KinematicTree& tree, const JointSet& joints,
              const TwistAngles& twists, const Mat3& root_rotation);

// Inverse of the solve_ik decomposition, for fixtures and pose databases.
TwistAngles extract_twists(const KinematicTree& tree, const Pose& pose);

// Fits the root orientation from the pelvis triangle (left hip, right hip,
// first spine joint) by two chained swings: rest normal onto target normal,
// then hip axis onto hip axis. Exact when those three joints carry identity
// local rotations; an approximation otherwise.
Mat3 fit_root_rotation(const KinematicTree& tree, const JointSet& joints);

}  // namespace c2b
