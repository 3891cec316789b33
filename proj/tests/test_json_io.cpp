#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "c2b/error.hpp"
#include "c2b/json_io.hpp"
#include "test_util.hpp"

namespace c2b {
namespace {

namespace fs = std::filesystem;

std::string fresh_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("c2b_json_io_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string read_file(const std::string& path) {
  std::ifstream ifs(path, std::ios::binary);
  REQUIRE(ifs.good());
  std::ostringstream ss;
  ss << ifs.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream ofs(path, std::ios::binary | std::ios::trunc);
  REQUIRE(ofs.good());
  ofs << text;
}

template <typename F>
void check_error(F&& fn, ErrorKind kind, const std::string& fragment) {
  try {
    fn();
    FAIL_CHECK("expected an error mentioning: " << fragment);
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
    CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos,
                  "message was: " << e.what());
  }
}

Pose random_valid_pose(Rng& rng, int joints) {
  return testutil::random_pose(rng, joints);
}

TEST_CASE("skeleton files round-trip exactly") {
  const std::string dir = fresh_dir();
  const KinematicTree tree = default_tree();
  const std::string path = dir + "/skeleton.json";
  save_tree(tree, path);
  const KinematicTree back = load_tree(path);
  REQUIRE(back.joint_count() == tree.joint_count());
  for (int k = 0; k < tree.joint_count(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    CHECK(back.parent[i] == tree.parent[i]);
    CHECK(back.name[i] == tree.name[i]);
    CHECK(back.rest_offset[i] == tree.rest_offset[i]);
  }
  save_tree(back, dir + "/skeleton2.json");
  CHECK(read_file(path) == read_file(dir + "/skeleton2.json"));
}

TEST_CASE("skeleton loading reports what is wrong and where") {
  const std::string dir = fresh_dir();
  check_error([&] { load_tree(dir + "/absent.json"); }, ErrorKind::io,
              "absent.json");

  const std::string bad = dir + "/bad.json";
  write_file(bad, "{\"joints\": [{\"name\": \"pelvis\",]}");
  check_error([&] { load_tree(bad); }, ErrorKind::invalid_input, "parse error");
  check_error([&] { load_tree(bad); }, ErrorKind::invalid_input, "bad.json");

  write_file(bad, "{\"joints\": [{\"name\": \"pelvis\", \"parent\": null}]}");
  check_error([&] { load_tree(bad); }, ErrorKind::invalid_input, "offset");

  write_file(bad,
             "{\"joints\": [{\"name\": \"pelvis\", \"parent\": 3, "
             "\"offset\": [0, 0, 0]}]}");
  check_error([&] { load_tree(bad); }, ErrorKind::invalid_input, "bad.json");
}

TEST_CASE("pose files round-trip bitwise and reject corrupt rotations") {
  const std::string dir = fresh_dir();
  Rng rng(77);
  const Pose pose = random_valid_pose(rng, 24);
  const std::string path = dir + "/pose.json";
  save_pose(pose, path);
  const Pose back = load_pose(path);
  REQUIRE(back.joint_count() == 24);
  CHECK(back.root_translation == pose.root_translation);
  for (int k = 0; k < 24; ++k)
    CHECK(back.rotations[static_cast<std::size_t>(k)] ==
          pose.rotations[static_cast<std::size_t>(k)]);

  Pose skewed = pose;
  skewed.rotations[5].row(1) *= 1.1;
  const std::string bad = dir + "/bad_pose.json";
  save_pose(skewed, bad);
  check_error([&] { load_pose(bad); }, ErrorKind::invalid_input,
              "rotations[5]");
}

TEST_CASE("twist files round-trip") {
  const std::string dir = fresh_dir();
  TwistAngles twists;
  twists.phi = {0.25, -1.5, 3.0, 0.0, 1e-9};
  const std::string path = dir + "/twists.json";
  save_twists(twists, path);
  CHECK(load_twists(path).phi == twists.phi);
  write_file(path, "{\"phi\": [1, \"two\"]}");
  check_error([&] { load_twists(path); }, ErrorKind::invalid_input, "phi[1]");
}

TEST_CASE("camera files carry a single focal length") {
  const std::string dir = fresh_dir();
  PerspectiveCamera cam;
  cam.fx = cam.fy = 850.5;
  cam.cx = 320.25;
  cam.cy = 240.75;
  cam.width = 640;
  cam.height = 480;
  const std::string path = dir + "/camera.json";
  save_camera(cam, path);
  const PerspectiveCamera back = load_camera(path);
  CHECK(back.fx == cam.fx);
  CHECK(back.fy == cam.fx);
  CHECK(back.cx == cam.cx);
  CHECK(back.cy == cam.cy);
  CHECK(back.width == cam.width);
  CHECK(back.height == cam.height);

  PerspectiveCamera aniso = cam;
  aniso.fy = 900.0;
  check_error([&] { save_camera(aniso, dir + "/x.json"); },
              ErrorKind::invalid_input, "single focal");
  write_file(path, "{\"focal\": -5, \"cx\": 0, \"cy\": 0, \"width\": 10, "
                   "\"height\": 10}");
  check_error([&] { load_camera(path); }, ErrorKind::invalid_input, "focal");
}

TEST_CASE("keypoint files preserve pixels and visibility") {
  const std::string dir = fresh_dir();
  ImageKeypoints kp;
  kp.pixels = {Vec2(10.5, 20.25), Vec2(-3.0, 7.0), Vec2(0.0, 0.0)};
  kp.visible = {true, false, true};
  const std::string path = dir + "/kp.json";
  save_keypoints(kp, path);
  const ImageKeypoints back = load_keypoints(path);
  REQUIRE(back.joint_count() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back.pixels[static_cast<std::size_t>(k)] ==
          kp.pixels[static_cast<std::size_t>(k)]);
    CHECK(back.is_visible(k) == kp.is_visible(k));
  }

  write_file(path, "{\"points\": [[1, 2], [3, 4]]}");
  const ImageKeypoints all_visible = load_keypoints(path);
  CHECK(all_visible.joint_count() == 2);
  CHECK(all_visible.visible.empty());
  CHECK(all_visible.is_visible(1));

  write_file(path, "{\"points\": [[1, 2]], \"visible\": [true, false]}");
  check_error([&] { load_keypoints(path); }, ErrorKind::invalid_input,
              "sizes differ");
}

TEST_CASE("landmark files hold pixel pairs and camera-space points") {
  const std::string dir = fresh_dir();
  LandmarkFile lm;
  lm.category = "trousers";
  lm.points.push_back({"left_waist", Vec3(101.5, 220.0, 0.0), true});
  lm.points.push_back({"right_waist", Vec3(88.25, 219.5, 0.0), true});
  lm.points.push_back({"left_hip", Vec3(0.12, -0.31, 3.5), false});
  const std::string path = dir + "/landmarks.json";
  save_landmarks(lm, path);
  const LandmarkFile back = load_landmarks(path);
  CHECK(back.category == "trousers");
  REQUIRE(back.points.size() == 3);
  for (const LandmarkObservation& want : lm.points) {
    bool found = false;
    for (const LandmarkObservation& got : back.points) {
      if (got.name != want.name) continue;
      found = true;
      CHECK(got.is_pixel == want.is_pixel);
      CHECK(got.value == want.value);
    }
    CHECK_MESSAGE(found, want.name);
  }

  write_file(path, "{\"category\": \"shorts\", \"points\": {\"left_hip\": "
                   "[1, 2, 3, 4]}}");
  check_error([&] { load_landmarks(path); }, ErrorKind::invalid_input,
              "left_hip");

  LandmarkFile dup = lm;
  dup.points.push_back({"left_waist", Vec3(1.0, 2.0, 0.0), true});
  check_error([&] { save_landmarks(dup, dir + "/dup.json"); },
              ErrorKind::invalid_input, "duplicate landmark");
}

TEST_CASE("semantic map files round-trip the builtin map") {
  const std::string dir = fresh_dir();
  const LandmarkSemanticMap map = default_landmark_map();
  const std::string path = dir + "/map.json";
  save_semantic_map(map, path);
  const LandmarkSemanticMap back = load_semantic_map(path);
  CHECK(back.categories == map.categories);

  write_file(path, "{\"shorts\": {\"inseam\": [\"a\", \"b\"]}}");
  check_error([&] { load_semantic_map(path); }, ErrorKind::invalid_input,
              "inseam");
}

TEST_CASE("model files round-trip the full parametric body") {
  const std::string dir = fresh_dir();
  const BodyModel model = synth_body_model(24, 10, 458, 1);
  const std::string path = dir + "/model.json";
  save_model(model, path);
  const BodyModel back = load_model(path);
  REQUIRE(back.vertex_count() == model.vertex_count());
  REQUIRE(back.shape_dims() == model.shape_dims());
  REQUIRE(back.joint_count() == model.joint_count());
  for (int v = 0; v < model.vertex_count(); ++v)
    CHECK(back.template_vertices[static_cast<std::size_t>(v)] ==
          model.template_vertices[static_cast<std::size_t>(v)]);
  CHECK(back.faces.size() == model.faces.size());
  for (std::size_t f = 0; f < model.faces.size(); ++f)
    CHECK(back.faces[f] == model.faces[f]);
  for (int s = 0; s < model.shape_dims(); ++s)
    for (int v = 0; v < model.vertex_count(); ++v)
      CHECK(back.blendshapes[static_cast<std::size_t>(s)]
                            [static_cast<std::size_t>(v)] ==
            model.blendshapes[static_cast<std::size_t>(s)]
                             [static_cast<std::size_t>(v)]);
  for (int k = 0; k < model.joint_count(); ++k)
    CHECK(back.joint_regressor[static_cast<std::size_t>(k)].entries ==
          model.joint_regressor[static_cast<std::size_t>(k)].entries);
  for (int v = 0; v < model.vertex_count(); ++v)
    CHECK(back.skin_weights[static_cast<std::size_t>(v)].entries ==
          model.skin_weights[static_cast<std::size_t>(v)].entries);

  ShapeParams beta = ShapeParams::zero(10);
  beta.beta << 0.3, -1.2, 0.5, 0.0, 2.0, -0.7, 0.1, 1.1, -0.4, 0.9;
  const JointSet a = rest_joints(model, beta);
  const JointSet b = rest_joints(back, beta);
  for (int k = 0; k < model.joint_count(); ++k)
    CHECK(a.positions[static_cast<std::size_t>(k)] ==
          b.positions[static_cast<std::size_t>(k)]);

  std::string text = read_file(path);
  const auto at = text.find("\"skin_weights\"");
  REQUIRE(at != std::string::npos);
  text.replace(at, 14, "\"skin_wts_old\"");
  write_file(path, text);
  check_error([&] { load_model(path); }, ErrorKind::invalid_input,
              "skin_weights");
}

TEST_CASE("pose database files hold one validated record per line") {
  const std::string dir = fresh_dir();
  Rng rng(5);
  PoseDatabase db;
  for (int i = 0; i < 3; ++i)
    db.entries.push_back({random_valid_pose(rng, 24),
                          "pose_" + std::to_string(i)});
  const std::string path = dir + "/db.jsonl";
  save_pose_database(db, path);

  const std::string text = read_file(path);
  int lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 3);

  const PoseDatabase back = load_pose_database(path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.entries[i].tag == db.entries[i].tag);
    CHECK(back.entries[i].pose.root_translation ==
          db.entries[i].pose.root_translation);
    for (int k = 0; k < 24; ++k)
      CHECK(back.entries[i].pose.rotations[static_cast<std::size_t>(k)] ==
            db.entries[i].pose.rotations[static_cast<std::size_t>(k)]);
  }

  std::istringstream in(text);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  write_file(path, l1 + "\n" + "{broken\n" + l3 + "\n");
  check_error([&] { load_pose_database(path); }, ErrorKind::invalid_input,
              ":2");

  PoseDatabase skewed = db;
  skewed.entries[1].pose.rotations[3] *= 1.05;
  save_pose_database(skewed, path);
  check_error([&] { load_pose_database(path); }, ErrorKind::invalid_input,
              ":2.rotations[3]");
}

TEST_CASE("shape vectors and translations round-trip") {
  const std::string dir = fresh_dir();
  Eigen::VectorXd beta(4);
  beta << 0.5, -1.25, 3.0, 1e-7;
  save_shape_vector(beta, dir + "/beta.json");
  const Eigen::VectorXd back = load_shape_vector(dir + "/beta.json");
  REQUIRE(back.size() == 4);
  CHECK(back == beta);

  const Vec3 t(0.125, -0.5, 3.75);
  save_translation(t, dir + "/t.json");
  CHECK(load_translation(dir + "/t.json") == t);

  write_file(dir + "/beta.json", "{\"shape\": [1, 2]}");
  check_error([&] { load_shape_vector(dir + "/beta.json"); },
              ErrorKind::invalid_input, "beta");
}

Scenario make_scenario(const std::string& dir, std::uint64_t seed) {
  const BodyModel model = synth_body_model(24, 10, 458, 1);
  save_tree(model.tree, dir + "/skeleton.json");
  save_model(model, dir + "/model.json");

  Rng rng(seed);
  Scenario sc;
  sc.skeleton_ref = "skeleton.json";
  sc.model_ref = "model.json";
  sc.tree = model.tree;
  sc.model = model;
  const int n = model.joint_count();
  for (int k = 0; k < n; ++k) {
    sc.image_joints.pixels.push_back(
        Vec2(rng.uniform(0, 1024), rng.uniform(0, 1024)));
    sc.image_joints.visible.push_back(k % 5 != 0);
    sc.cloth_mask.covered.push_back(k % 2 == 0);
    sc.depth_offsets.push_back(rng.uniform(-0.2, 0.2));
  }
  sc.twists = TwistAngles::zero(n - 1);
  for (double& phi : sc.twists.phi) phi = rng.uniform(-1.0, 1.0);
  LandmarkFile lm;
  lm.category = "trousers";
  lm.points.push_back({"left_waist", Vec3(400.0, 500.0, 0.0), true});
  lm.points.push_back({"right_waist", Vec3(350.0, 500.0, 0.0), true});
  sc.landmarks = lm;
  sc.ground_truth.pose = random_valid_pose(rng, n);
  Eigen::VectorXd beta(10);
  for (int i = 0; i < 10; ++i) beta[i] = rng.uniform(-2, 2);
  sc.ground_truth.beta = beta;
  sc.ground_truth.translation = Vec3(0.1, -0.2, 3.5);
  return sc;
}

TEST_CASE("scenario files load their referenced skeleton and model") {
  const std::string dir = fresh_dir();
  const Scenario sc = make_scenario(dir, 11);
  const std::string path = dir + "/scenario.json";
  save_scenario(sc, path);
  save_scenario(sc, dir + "/scenario2.json");
  CHECK(read_file(path) == read_file(dir + "/scenario2.json"));

  const Scenario back = load_scenario(path);
  CHECK(back.skeleton_ref == "skeleton.json");
  CHECK(back.model_ref == "model.json");
  CHECK(back.tree.joint_count() == 24);
  CHECK(back.model.vertex_count() == sc.model.vertex_count());
  REQUIRE(back.image_joints.joint_count() == 24);
  for (int k = 0; k < 24; ++k) {
    CHECK(back.image_joints.pixels[static_cast<std::size_t>(k)] ==
          sc.image_joints.pixels[static_cast<std::size_t>(k)]);
    CHECK(back.image_joints.is_visible(k) == sc.image_joints.is_visible(k));
    CHECK(back.cloth_mask.covered[static_cast<std::size_t>(k)] ==
          sc.cloth_mask.covered[static_cast<std::size_t>(k)]);
  }
  CHECK(back.depth_offsets == sc.depth_offsets);
  CHECK(back.twists.phi == sc.twists.phi);
  REQUIRE(back.landmarks.has_value());
  CHECK(back.landmarks->category == "trousers");
  CHECK(back.landmarks->points.size() == 2);
  REQUIRE(back.ground_truth.pose.has_value());
  REQUIRE(back.ground_truth.beta.has_value());
  REQUIRE(back.ground_truth.translation.has_value());
  CHECK(*back.ground_truth.translation == *sc.ground_truth.translation);
  CHECK(*back.ground_truth.beta == *sc.ground_truth.beta);
  for (int k = 0; k < 24; ++k)
    CHECK(back.ground_truth.pose->rotations[static_cast<std::size_t>(k)] ==
          sc.ground_truth.pose->rotations[static_cast<std::size_t>(k)]);
}

TEST_CASE("scenario loading enforces joint-count consistency") {
  const std::string dir = fresh_dir();
  Scenario sc = make_scenario(dir, 12);
  sc.twists.phi.pop_back();
  save_scenario(sc, dir + "/scenario.json");
  check_error([&] { load_scenario(dir + "/scenario.json"); },
              ErrorKind::invalid_input, "twists");

  Scenario sc2 = make_scenario(dir, 13);
  sc2.image_joints.pixels.pop_back();
  sc2.image_joints.visible.pop_back();
  save_scenario(sc2, dir + "/scenario.json");
  check_error([&] { load_scenario(dir + "/scenario.json"); },
              ErrorKind::invalid_input, "image_joints");

  Scenario sc3 = make_scenario(dir, 14);
  sc3.skeleton_ref = "missing.json";
  save_scenario(sc3, dir + "/scenario.json");
  check_error([&] { load_scenario(dir + "/scenario.json"); }, ErrorKind::io,
              "missing.json");

  Scenario sc4 = make_scenario(dir, 15);
  Eigen::VectorXd beta(3);
  beta << 1, 2, 3;
  sc4.ground_truth.beta = beta;
  save_scenario(sc4, dir + "/scenario.json");
  check_error([&] { load_scenario(dir + "/scenario.json"); },
              ErrorKind::invalid_input, "ground_truth.beta");
}

TEST_CASE("scenario depth offsets default to zero per joint") {
  const std::string dir = fresh_dir();
  Scenario sc = make_scenario(dir, 16);
  sc.depth_offsets.clear();
  sc.landmarks.reset();
  sc.ground_truth = GroundTruth{};
  const std::string path = dir + "/scenario.json";
  save_scenario(sc, path);
  std::string text = read_file(path);
  CHECK(text.find("ground_truth") == std::string::npos);
  CHECK(text.find("landmarks") == std::string::npos);

  const Scenario back = load_scenario(path);
  CHECK(back.depth_offsets == std::vector<double>(24, 0.0));
  CHECK_FALSE(back.landmarks.has_value());
  CHECK_FALSE(back.ground_truth.any());
}

TEST_CASE("config files override defaults field by field") {
  const std::string dir = fresh_dir();
  const std::string path = dir + "/config.json";
  write_file(path, "{}");
  const PipelineConfig defaults = load_config(path);
  CHECK(defaults.camera.fx == 1000.0);
  CHECK(defaults.camera.cx == 512.0);
  CHECK(defaults.anchors.bones == default_anchor_bones().bones);
  CHECK(defaults.covered_weight == 1.0);
  CHECK(defaults.uncovered_weight == 0.2);
  CHECK(defaults.bands.chest == 0.72);
  CHECK(defaults.bands.half_thickness == 0.02);
  CHECK(defaults.landmark_map_path.empty());

  write_file(path, R"({
    "camera": {"focal": 500, "cx": 100, "cy": 100, "width": 200, "height": 200},
    "anchors": [["pelvis", "spine1"]],
    "covered_weight": 2.0,
    "uncovered_weight": 0.5,
    "bands": {"waist": 0.55, "half_thickness": 0.03},
    "landmark_map": "map.json"
  })");
  const PipelineConfig cfg = load_config(path);
  CHECK(cfg.camera.fx == 500.0);
  CHECK(cfg.anchors.bones.size() == 1);
  CHECK(cfg.anchors.bones[0].first == "pelvis");
  CHECK(cfg.covered_weight == 2.0);
  CHECK(cfg.uncovered_weight == 0.5);
  CHECK(cfg.bands.chest == 0.72);
  CHECK(cfg.bands.waist == 0.55);
  CHECK(cfg.bands.half_thickness == 0.03);
  CHECK(cfg.landmark_map_path == "map.json");

  write_file(path, "{\"bands\": {\"waist\": 1.5}}");
  check_error([&] { load_config(path); }, ErrorKind::invalid_input, "bands");
  write_file(path, "{\"covered_weight\": -1}");
  check_error([&] { load_config(path); }, ErrorKind::invalid_input,
              "nonnegative");
  write_file(path, "{\"anchors\": []}");
  check_error([&] { load_config(path); }, ErrorKind::invalid_input, "anchors");
}

TEST_CASE("measurement reports flag absent entries") {
  const std::string dir = fresh_dir();
  MeasurementVector mv;
  mv.set(Measure::height, 1.71);
  mv.set(Measure::waist_width, 0.305);
  const std::string path = dir + "/report.json";
  save_measurement_report(mv, path);

  const std::string text = read_file(path);
  CHECK(text.find("\"height\"") != std::string::npos);
  CHECK(text.find("\"arm_span\"") != std::string::npos);
  CHECK(text.find("null") != std::string::npos);

  const MeasurementVector back = load_measurement_report(path);
  CHECK(back.has(Measure::height));
  CHECK(back.has(Measure::waist_width));
  CHECK_FALSE(back.has(Measure::chest_width));
  CHECK_FALSE(back.has(Measure::arm_span));
  CHECK(back[Measure::height] == 1.71);
  CHECK(back[Measure::waist_width] == 0.305);
  CHECK(back.present_count() == 2);
}

TEST_CASE("metric reports serialize to json and csv") {
  const std::string dir = fresh_dir();
  MetricReport report;
  report.mpjpe_c_mm = 1.5;
  report.kpe2d_px = 2.0;
  save_metric_report_json(report, dir + "/m.json");
  save_metric_report_csv(report, dir + "/m.csv");

  const MetricReport back = load_metric_report(dir + "/m.json");
  CHECK(back.mpjpe_c_mm == 1.5);
  CHECK_FALSE(back.pa_mpjpe_c_mm.has_value());
  CHECK(back.kpe2d_px == 2.0);
  CHECK_FALSE(back.shape_errors_mm.has_value());

  CHECK(read_file(dir + "/m.csv") ==
        "mpjpe_c_mm,pa_mpjpe_c_mm,kpe2d_px,height_mm,chest_mm,waist_mm,"
        "hips_mm\n1.5,,2,,,,\n");

  MeasurementVector shapes;
  shapes.set(Measure::height, 12.5);
  shapes.set(Measure::chest_width, 3.25);
  shapes.set(Measure::waist_width, 0.5);
  shapes.set(Measure::hips_width, 7.75);
  MetricReport full;
  full.mpjpe_c_mm = 10.0;
  full.pa_mpjpe_c_mm = 8.5;
  full.kpe2d_px = 1.25;
  full.shape_errors_mm = shapes;
  save_metric_report_json(full, dir + "/full.json");
  save_metric_report_csv(full, dir + "/full.csv");
  const MetricReport fb = load_metric_report(dir + "/full.json");
  CHECK(fb.pa_mpjpe_c_mm == 8.5);
  REQUIRE(fb.shape_errors_mm.has_value());
  CHECK((*fb.shape_errors_mm)[Measure::height] == 12.5);
  CHECK((*fb.shape_errors_mm)[Measure::hips_width] == 7.75);
  CHECK(read_file(dir + "/full.csv") ==
        "mpjpe_c_mm,pa_mpjpe_c_mm,kpe2d_px,height_mm,chest_mm,waist_mm,"
        "hips_mm\n10,8.5,1.25,12.5,3.25,0.5,7.75\n");
}

}  // namespace
}  // namespace c2b
