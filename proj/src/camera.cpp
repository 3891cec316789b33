#include "c2b/camera.hpp"

#include "c2b/error.hpp"

namespace c2b {

AnchorBoneSet default_anchor_bones() {
  return {{{"pelvis", "spine1"},
           {"spine1", "spine2"},
           {"spine2", "spine3"},
           {"pelvis", "left_hip"},
           {"pelvis", "right_hip"}}};
}

Vec2 project_point(const PerspectiveCamera& camera, const Vec3& point) {
  if (point.z() <= 0.0)
    fail_numeric("cannot project a point at non-positive depth");
  return {camera.cx + camera.fx * point.x() / point.z(),
          camera.cy + camera.fy * point.y() / point.z()};
}

std::vector<Vec2> project(const PerspectiveCamera& camera,
                          const std::vector<Vec3>& points) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(project_point(camera, p));
  return out;
}

Vec3 back_project(const PerspectiveCamera& camera, const Vec2& pixel,
                  double depth) {
  if (depth <= 0.0) fail_numeric("back-projection needs positive depth");
  return {(pixel.x() - camera.cx) * depth / camera.fx,
          (pixel.y() - camera.cy) * depth / camera.fy, depth};
}

double adaptive_depth(const PerspectiveCamera& camera,
                      const KinematicTree& tree, const JointSet& rest_joints,
                      const ImageKeypoints& keypoints,
                      const AnchorBoneSet& anchors) {
  if (anchors.bones.empty()) fail_input("anchor bone set is empty");
  if (rest_joints.joint_count() != tree.joint_count())
    fail_input("rest joint set does not match the skeleton");
  if (keypoints.joint_count() != tree.joint_count())
    fail_input("image keypoints do not match the skeleton");

  double sum_m = 0.0;
  double sum_px = 0.0;
  for (const auto& [a, b] : anchors.bones) {
    int ia = tree.index_of(a);
    int ib = tree.index_of(b);
    sum_m += (rest_joints.positions[ib] - rest_joints.positions[ia]).norm();
    sum_px += (keypoints.pixels[ib] - keypoints.pixels[ia]).norm();
  }
  if (sum_px <= 0.0)
    fail_numeric("anchor keypoints are coincident; depth is unconstrained");
  if (sum_m <= 0.0) fail_numeric("anchor rest bones have zero total length");
  return camera.fx * sum_m / sum_px;
}

Vec3 place_body(const PerspectiveCamera& camera, const Vec2& root_pixel,
                double depth) {
  return back_project(camera, root_pixel, depth);
}

}  // namespace c2b
