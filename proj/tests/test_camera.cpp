#include <doctest.h>

#include "c2b/body_model.hpp"
#include "c2b/camera.hpp"
#include "test_util.hpp"

using namespace c2b;
using namespace c2b::testutil;

TEST_CASE("projection matches hand-computed pixels") {
  PerspectiveCamera cam;
  Vec2 px = project_point(cam, Vec3(0.1, -0.2, 2.0));
  CHECK(px.x() == doctest::Approx(562.0).epsilon(1e-12));
  CHECK(px.y() == doctest::Approx(412.0).epsilon(1e-12));
}

TEST_CASE("projection rejects points behind the camera") {
  PerspectiveCamera cam;
  CHECK_THROWS_AS(project_point(cam, Vec3(0, 0, 0)), Error);
  try {
    project_point(cam, Vec3(0, 0, -1));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
  }
}

TEST_CASE("projection and back-projection round trip") {
  PerspectiveCamera cam;
  cam.fx = 800;
  cam.fy = 900;
  cam.cx = 300;
  cam.cy = 200;
  Rng rng(derive_seed(19, "proj-round", 0));
  for (int rep = 0; rep < 200; ++rep) {
    Vec3 p(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.2, 9));
    Vec2 px = project_point(cam, p);
    Vec3 back = back_project(cam, px, p.z());
    CHECK((back - p).norm() < 1e-12);
  }
}

TEST_CASE("adaptive depth matches a hand-computed ratio") {
  // one 0.12 m anchor bone spanning 30 px at fx=1000 sits at 4 m
  PerspectiveCamera cam;
  KinematicTree tree =
      build_tree({kRootParent, 0}, {{0, 0, 0}, {0, 0.12, 0}},
                 {"pelvis", "spine1"});
  JointSet rest;
  rest.positions = {Vec3(0, 0, 0), Vec3(0, 0.12, 0)};
  ImageKeypoints kp;
  kp.pixels = {Vec2(512, 512), Vec2(512, 542)};
  AnchorBoneSet anchors{{{"pelvis", "spine1"}}};
  CHECK(adaptive_depth(cam, tree, rest, kp, anchors) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("adaptive depth recovers the true depth of upright bodies") {
  BodyModel model = synth_body_model(24, 10, 890, 7);
  PerspectiveCamera cam;
  Rng rng(derive_seed(19, "depth", 0));
  AnchorBoneSet anchors = default_anchor_bones();
  for (int rep = 0; rep < 50; ++rep) {
    ShapeParams beta = ShapeParams::zero(10);
    for (int i = 0; i < 10; ++i) beta.beta[i] = rng.uniform(-2, 2);
    JointSet rest = rest_joints(model, beta);
    double z = rng.uniform(1.5, 8.0);
    Vec3 t(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), z);
    std::vector<Vec3> world;
    for (const Vec3& p : rest.positions) world.push_back(p + t);
    ImageKeypoints kp;
    kp.pixels = project(cam, world);
    double est = adaptive_depth(cam, model.tree, rest, kp, anchors);
    // anchor bones all lie in the fronto-parallel plane z = t.z
    CHECK(est == doctest::Approx(z).epsilon(1e-9));
  }
}

TEST_CASE("depth grows with body size and with smaller projections") {
  PerspectiveCamera cam;
  KinematicTree tree =
      build_tree({kRootParent, 0}, {{0, 0, 0}, {0, 0.12, 0}},
                 {"pelvis", "spine1"});
  JointSet rest;
  rest.positions = {Vec3(0, 0, 0), Vec3(0, 0.12, 0)};
  JointSet taller;
  taller.positions = {Vec3(0, 0, 0), Vec3(0, 0.15, 0)};
  ImageKeypoints kp;
  kp.pixels = {Vec2(512, 512), Vec2(512, 542)};
  ImageKeypoints smaller;
  smaller.pixels = {Vec2(512, 512), Vec2(512, 527)};
  AnchorBoneSet anchors{{{"pelvis", "spine1"}}};

  double base = adaptive_depth(cam, tree, rest, kp, anchors);
  CHECK(adaptive_depth(cam, tree, taller, kp, anchors) > base);
  CHECK(adaptive_depth(cam, tree, rest, smaller, anchors) > base);
}

TEST_CASE("adaptive depth validates its inputs") {
  PerspectiveCamera cam;
  KinematicTree tree =
      build_tree({kRootParent, 0}, {{0, 0, 0}, {0, 0.12, 0}},
                 {"pelvis", "spine1"});
  JointSet rest;
  rest.positions = {Vec3(0, 0, 0), Vec3(0, 0.12, 0)};
  ImageKeypoints kp;
  kp.pixels = {Vec2(512, 512), Vec2(512, 512)};

  CHECK_THROWS_AS(adaptive_depth(cam, tree, rest, kp, AnchorBoneSet{}), Error);
  AnchorBoneSet unknown{{{"pelvis", "no_such_joint"}}};
  CHECK_THROWS_AS(adaptive_depth(cam, tree, rest, kp, unknown), Error);
  // coincident anchor pixels leave the depth unconstrained
  AnchorBoneSet anchors{{{"pelvis", "spine1"}}};
  try {
    adaptive_depth(cam, tree, rest, kp, anchors);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
  }
}

TEST_CASE("place_body reprojects onto the requested pixel") {
  PerspectiveCamera cam;
  cam.fx = 1111;
  cam.cy = 480;
  Rng rng(derive_seed(19, "place", 0));
  for (int rep = 0; rep < 100; ++rep) {
    Vec2 px(rng.uniform(0, 1024), rng.uniform(0, 1024));
    double z = rng.uniform(0.5, 9.0);
    Vec3 t = place_body(cam, px, z);
    CHECK(t.z() == z);
    CHECK((project_point(cam, t) - px).norm() < 1e-9);
  }
}
