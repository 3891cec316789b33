#pragma once

#include <string>
#include <utility>
#include <vector>

#include "c2b/kinematics.hpp"

namespace c2b {

// Pinhole camera. Pixel coordinates share the camera frame orientation:
// u = cx + fx*x/z, v = cy + fy*y/z with +y up and +z forward; points must
// sit strictly in front of the camera.
struct PerspectiveCamera {
  double fx = 1000.0;
  double fy = 1000.0;
  double cx = 512.0;
  double cy = 512.0;
  int width = 1024;
  int height = 1024;
};

struct ImageKeypoints {
  std::vector<Vec2> pixels;
  std::vector<bool> visible;  // empty means all visible

  int joint_count() const { return static_cast<int>(pixels.size()); }
  bool is_visible(int k) const {
    return visible.empty() || visible[static_cast<std::size_t>(k)];
  }
};

// Torso bones used for depth estimation, as (parent, child) joint names.
// They are nearly fronto-parallel for upright bodies, which is what makes
// the ratio-of-lengths depth estimate work.
struct AnchorBoneSet {
  std::vector<std::pair<std::string, std::string>> bones;
};

AnchorBoneSet default_anchor_bones();

std::vector<Vec2> project(const PerspectiveCamera& camera,
                          const std::vector<Vec3>& points);
Vec2 project_point(const PerspectiveCamera& camera, const Vec3& point);
Vec3 back_project(const PerspectiveCamera& camera, const Vec2& pixel,
                  double depth);

// Depth from the ratio of summed rest-skeleton anchor bone lengths (meters)
// to summed image anchor bone lengths (pixels): z = fx * sum_m / sum_px.
double adaptive_depth(const PerspectiveCamera& camera,
                      const KinematicTree& tree, const JointSet& rest_joints,
                      const ImageKeypoints& keypoints,
                      const AnchorBoneSet& anchors);

// Root translation that reprojects onto the given root pixel at the given
// depth.
Vec3 place_body(const PerspectiveCamera& camera, const Vec2& root_pixel,
                double depth);

}  // namespace c2b
