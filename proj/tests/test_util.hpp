#pragma once

#include <string>
#include <vector>

#include "c2b/error.hpp"
#include "c2b/kinematics.hpp"
#include "c2b/rng.hpp"

namespace c2b::testutil {

inline Vec3 random_unit(Rng& rng) {
  while (true) {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    double n = v.norm();
    if (n > 1e-6) return v / n;
  }
}

inline Mat3 random_rotation(Rng& rng) {
  return axis_angle_to_matrix(random_unit(rng) *
                              rng.uniform(-3.1415, 3.1415));
}

inline KinematicTree random_tree(Rng& rng, int joints) {
  std::vector<int> parents(joints);
  std::vector<Vec3> offsets(joints);
  std::vector<std::string> names(joints);
  parents[0] = kRootParent;
  offsets[0] = Vec3::Zero();
  names[0] = "j0";
  for (int k = 1; k < joints; ++k) {
    parents[k] = static_cast<int>(rng.next_u64() % k);
    offsets[k] = random_unit(rng) * rng.uniform(0.05, 0.6);
    names[k] = "j" + std::to_string(k);
  }
  return build_tree(parents, offsets, names);
}

inline Pose random_pose(Rng& rng, int joints) {
  Pose pose = Pose::identity(joints);
  for (int k = 0; k < joints; ++k) pose.rotations[k] = random_rotation(rng);
  pose.root_translation = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2),
                               rng.uniform(-2, 2));
  return pose;
}

}  // namespace c2b::testutil
