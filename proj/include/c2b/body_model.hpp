#pragma once

#include <cstdint>
#include <string>

#include "c2b/kinematics.hpp"

namespace c2b {

struct ShapeParams {
  Eigen::VectorXd beta;

  int dims() const { return static_cast<int>(beta.size()); }
  static ShapeParams zero(int m) {
    ShapeParams s;
    s.beta = Eigen::VectorXd::Zero(m);
    return s;
  }
};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> faces;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
};

// Sparse row of nonnegative weights over vertices (joint regressor) or
// joints (skin weights); each row sums to 1.
struct WeightRow {
  std::vector<std::pair<int, double>> entries;
};

// SMPL-like parametric body: template mesh, linear shape blendshapes, a
// vertex-to-joint regressor and linear-blend-skinning weights over the
// kinematic tree. Immutable after construction.
struct BodyModel {
  std::vector<Vec3> template_vertices;
  std::vector<Eigen::Vector3i> faces;
  // blendshapes[i][v] is the displacement of vertex v per unit beta[i]
  std::vector<std::vector<Vec3>> blendshapes;
  std::vector<WeightRow> joint_regressor;  // one row per joint
  std::vector<WeightRow> skin_weights;     // one row per vertex
  KinematicTree tree;

  int vertex_count() const { return static_cast<int>(template_vertices.size()); }
  int joint_count() const { return tree.joint_count(); }
  int shape_dims() const { return static_cast<int>(blendshapes.size()); }

  void validate() const;
};

// Deterministic procedural humanoid built from capsule-segment rings around
// the default 24-joint skeleton. Designated shape components control, in
// order: overall height, chest width, waist width, hips width, shoulder
// width, leg length, arm length, torso length, belly depth, head girth
// (shape_dims selects a prefix of that list). The template is bilaterally
// symmetric and the regressed pelvis stays at the origin for every shape.
BodyModel synth_body_model(int joint_count, int shape_dims, int vertex_budget,
                           std::uint64_t seed);

// vertices = template + sum_i beta[i] * blendshape[i]
Mesh shape_mesh(const BodyModel& model, const ShapeParams& beta);

JointSet regress_joints(const BodyModel& model, const Mesh& rest_mesh);

// Rest joints at shape beta, i.e. regress_joints(shape_mesh(...)).
JointSet rest_joints(const BodyModel& model, const ShapeParams& beta);

// Tree whose offsets follow the regressed joints at shape beta.
KinematicTree shaped_tree(const BodyModel& model, const ShapeParams& beta);

// Linear blend skinning: per-joint rigid transforms from FK over the joints
// regressed at shape beta, blended by skin weights.
Mesh skin(const BodyModel& model, const ShapeParams& beta, const Pose& pose);

void export_obj(const Mesh& mesh, const std::string& path);
Mesh import_obj(const std::string& path);

}  // namespace c2b
