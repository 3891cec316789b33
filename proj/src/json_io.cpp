#include "c2b/json_io.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "c2b/error.hpp"

namespace c2b {
namespace {

using nlohmann::json;

json parse_json_file(const std::string& path) {
  std::ifstream ifs(path, std::ios::binary);
  if (!ifs) fail_io("cannot open " + path);
  try {
    return json::parse(ifs);
  } catch (const json::parse_error& e) {
    fail_input(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream ofs(path, std::ios::binary | std::ios::trunc);
  if (!ofs) fail_io("cannot open " + path + " for writing");
  ofs << content;
  if (!ofs) fail_io("failed writing " + path);
}

void write_json_file(const json& j, const std::string& path) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string format_double(double v) {
  std::array<char, 32> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

const json& require(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) fail_input(ctx + " is not an object");
  auto it = j.find(key);
  if (it == j.end()) fail_input(ctx + " is missing \"" + key + "\"");
  return *it;
}

double as_number(const json& j, const std::string& ctx) {
  if (!j.is_number()) fail_input(ctx + " is not a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) fail_input(ctx + " is not an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& ctx) {
  if (!j.is_boolean()) fail_input(ctx + " is not a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& ctx) {
  if (!j.is_string()) fail_input(ctx + " is not a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& ctx) {
  if (!j.is_array()) fail_input(ctx + " is not an array");
  return j;
}

const json& as_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) fail_input(ctx + " is not an object");
  return j;
}

std::string elem(const std::string& ctx, std::size_t k) {
  return ctx + "[" + std::to_string(k) + "]";
}

Vec2 as_vec2(const json& j, const std::string& ctx) {
  as_array(j, ctx);
  if (j.size() != 2) fail_input(ctx + " must hold 2 numbers");
  return Vec2(as_number(j[0], elem(ctx, 0)), as_number(j[1], elem(ctx, 1)));
}

Vec3 as_vec3(const json& j, const std::string& ctx) {
  as_array(j, ctx);
  if (j.size() != 3) fail_input(ctx + " must hold 3 numbers");
  return Vec3(as_number(j[0], elem(ctx, 0)), as_number(j[1], elem(ctx, 1)),
              as_number(j[2], elem(ctx, 2)));
}

Mat3 as_mat3(const json& j, const std::string& ctx) {
  as_array(j, ctx);
  if (j.size() != 9) fail_input(ctx + " must hold 9 numbers in row-major order");
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      m(r, c) = as_number(j[3 * r + c], elem(ctx, 3 * r + c));
  return m;
}

std::vector<double> as_double_vector(const json& j, const std::string& ctx) {
  as_array(j, ctx);
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(as_number(j[k], elem(ctx, k)));
  return out;
}

json from_vec2(const Vec2& v) { return json::array({v.x(), v.y()}); }
json from_vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json from_mat3(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

KinematicTree tree_from_json(const json& j, const std::string& ctx) {
  const json& joints = as_array(require(j, "joints", ctx), ctx + ".joints");
  std::vector<int> parents;
  std::vector<Vec3> offsets;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < joints.size(); ++k) {
    const std::string jc = elem(ctx + ".joints", k);
    const json& rec = as_object(joints[k], jc);
    names.push_back(as_string(require(rec, "name", jc), jc + ".name"));
    const json& parent = require(rec, "parent", jc);
    parents.push_back(parent.is_null() ? kRootParent
                                       : as_int(parent, jc + ".parent"));
    offsets.push_back(as_vec3(require(rec, "offset", jc), jc + ".offset"));
  }
  try {
    return build_tree(parents, offsets, names);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_input)
      fail_input(ctx + ": " + e.what());
    throw;
  }
}

json tree_to_json(const KinematicTree& tree) {
  json joints = json::array();
  for (int k = 0; k < tree.joint_count(); ++k) {
    json rec;
    rec["name"] = tree.name[static_cast<std::size_t>(k)];
    rec["parent"] = tree.parent[static_cast<std::size_t>(k)] == kRootParent
                        ? json(nullptr)
                        : json(tree.parent[static_cast<std::size_t>(k)]);
    rec["offset"] = from_vec3(tree.rest_offset[static_cast<std::size_t>(k)]);
    joints.push_back(rec);
  }
  return json{{"joints", joints}};
}

Pose pose_from_json(const json& j, const std::string& ctx) {
  const json& rots =
      as_array(require(j, "rotations", ctx), ctx + ".rotations");
  Pose pose;
  pose.rotations.reserve(rots.size());
  for (std::size_t k = 0; k < rots.size(); ++k) {
    const std::string rc = elem(ctx + ".rotations", k);
    Mat3 r = as_mat3(rots[k], rc);
    if (!is_rotation(r, 1e-9)) fail_input(rc + " is not a rotation matrix");
    pose.rotations.push_back(r);
  }
  pose.root_translation = as_vec3(require(j, "root_translation", ctx),
                                  ctx + ".root_translation");
  return pose;
}

json pose_to_json(const Pose& pose) {
  json rots = json::array();
  for (const Mat3& r : pose.rotations) rots.push_back(from_mat3(r));
  return json{{"rotations", rots},
              {"root_translation", from_vec3(pose.root_translation)}};
}

TwistAngles twists_from_json(const json& j, const std::string& ctx) {
  TwistAngles t;
  t.phi = as_double_vector(require(j, "phi", ctx), ctx + ".phi");
  return t;
}

json twists_to_json(const TwistAngles& twists) {
  return json{{"phi", twists.phi}};
}

PerspectiveCamera camera_from_json(const json& j, const std::string& ctx) {
  PerspectiveCamera cam;
  const double focal = as_number(require(j, "focal", ctx), ctx + ".focal");
  if (!(focal > 0.0)) fail_input(ctx + ".focal must be positive");
  cam.fx = focal;
  cam.fy = focal;
  cam.cx = as_number(require(j, "cx", ctx), ctx + ".cx");
  cam.cy = as_number(require(j, "cy", ctx), ctx + ".cy");
  cam.width = as_int(require(j, "width", ctx), ctx + ".width");
  cam.height = as_int(require(j, "height", ctx), ctx + ".height");
  if (cam.width <= 0 || cam.height <= 0)
    fail_input(ctx + ": width and height must be positive");
  return cam;
}

json camera_to_json(const PerspectiveCamera& camera, const std::string& ctx) {
  if (camera.fx != camera.fy)
    fail_input(ctx + ": the camera file stores a single focal length, fx and "
                     "fy differ");
  return json{{"focal", camera.fx},
              {"cx", camera.cx},
              {"cy", camera.cy},
              {"width", camera.width},
              {"height", camera.height}};
}

ImageKeypoints keypoints_from_json(const json& j, const std::string& ctx) {
  ImageKeypoints kp;
  const json& points = as_array(require(j, "points", ctx), ctx + ".points");
  kp.pixels.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k)
    kp.pixels.push_back(as_vec2(points[k], elem(ctx + ".points", k)));
  if (j.contains("visible") && !j["visible"].is_null()) {
    const json& vis = as_array(j["visible"], ctx + ".visible");
    if (vis.size() != points.size())
      fail_input(ctx + ": visible and points sizes differ");
    for (std::size_t k = 0; k < vis.size(); ++k)
      kp.visible.push_back(as_bool(vis[k], elem(ctx + ".visible", k)));
  }
  return kp;
}

json keypoints_to_json(const ImageKeypoints& keypoints) {
  json points = json::array();
  for (const Vec2& p : keypoints.pixels) points.push_back(from_vec2(p));
  json visible = json::array();
  for (int k = 0; k < keypoints.joint_count(); ++k)
    visible.push_back(keypoints.is_visible(k));
  return json{{"points", points}, {"visible", visible}};
}

LandmarkFile landmarks_from_json(const json& j, const std::string& ctx) {
  LandmarkFile out;
  out.category = as_string(require(j, "category", ctx), ctx + ".category");
  const json& points = as_object(require(j, "points", ctx), ctx + ".points");
  for (const auto& [label, value] : points.items()) {
    const std::string pc = ctx + ".points." + label;
    as_array(value, pc);
    LandmarkObservation obs;
    obs.name = label;
    if (value.size() == 2) {
      obs.is_pixel = true;
      const Vec2 px = as_vec2(value, pc);
      obs.value = Vec3(px.x(), px.y(), 0.0);
    } else if (value.size() == 3) {
      obs.is_pixel = false;
      obs.value = as_vec3(value, pc);
    } else {
      fail_input(pc + " must hold 2 (pixel) or 3 (camera-space) numbers");
    }
    out.points.push_back(obs);
  }
  return out;
}

json landmarks_to_json(const LandmarkFile& landmarks,
                       const std::string& ctx) {
  json points = json::object();
  for (const LandmarkObservation& obs : landmarks.points) {
    if (points.contains(obs.name))
      fail_input(ctx + ": duplicate landmark \"" + obs.name + "\"");
    points[obs.name] = obs.is_pixel
                           ? json::array({obs.value.x(), obs.value.y()})
                           : from_vec3(obs.value);
  }
  return json{{"category", landmarks.category}, {"points", points}};
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& ctx) {
  const std::vector<double> v = as_double_vector(j, ctx);
  return Eigen::Map<const Eigen::VectorXd>(
      v.data(), static_cast<Eigen::Index>(v.size()));
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

WeightRow weight_row_from_json(const json& j, const std::string& ctx) {
  as_array(j, ctx);
  WeightRow row;
  row.entries.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string ec = elem(ctx, k);
    const json& entry = as_array(j[k], ec);
    if (entry.size() != 2) fail_input(ec + " must be an [index, weight] pair");
    row.entries.emplace_back(as_int(entry[0], ec + "[0]"),
                             as_number(entry[1], ec + "[1]"));
  }
  return row;
}

json weight_row_to_json(const WeightRow& row) {
  json a = json::array();
  for (const auto& [idx, w] : row.entries)
    a.push_back(json::array({idx, w}));
  return a;
}

BodyModel model_from_json(const json& j, const std::string& ctx) {
  BodyModel m;
  const json& verts = as_array(require(j, "vertices", ctx), ctx + ".vertices");
  m.template_vertices.reserve(verts.size());
  for (std::size_t v = 0; v < verts.size(); ++v)
    m.template_vertices.push_back(as_vec3(verts[v], elem(ctx + ".vertices", v)));

  const json& faces = as_array(require(j, "faces", ctx), ctx + ".faces");
  m.faces.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const std::string fc = elem(ctx + ".faces", f);
    const json& tri = as_array(faces[f], fc);
    if (tri.size() != 3) fail_input(fc + " must hold 3 vertex indices");
    m.faces.emplace_back(as_int(tri[0], fc + "[0]"), as_int(tri[1], fc + "[1]"),
                         as_int(tri[2], fc + "[2]"));
  }

  const json& shapes =
      as_array(require(j, "blendshapes", ctx), ctx + ".blendshapes");
  m.blendshapes.reserve(shapes.size());
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const std::string sc = elem(ctx + ".blendshapes", s);
    const json& shape = as_array(shapes[s], sc);
    if (shape.size() != verts.size())
      fail_input(sc + " size differs from the vertex count");
    std::vector<Vec3> disp;
    disp.reserve(shape.size());
    for (std::size_t v = 0; v < shape.size(); ++v)
      disp.push_back(as_vec3(shape[v], elem(sc, v)));
    m.blendshapes.push_back(std::move(disp));
  }

  const json& regressor =
      as_array(require(j, "joint_regressor", ctx), ctx + ".joint_regressor");
  m.joint_regressor.reserve(regressor.size());
  for (std::size_t r = 0; r < regressor.size(); ++r)
    m.joint_regressor.push_back(
        weight_row_from_json(regressor[r], elem(ctx + ".joint_regressor", r)));

  const json& weights =
      as_array(require(j, "skin_weights", ctx), ctx + ".skin_weights");
  m.skin_weights.reserve(weights.size());
  for (std::size_t r = 0; r < weights.size(); ++r)
    m.skin_weights.push_back(
        weight_row_from_json(weights[r], elem(ctx + ".skin_weights", r)));

  m.tree = tree_from_json(require(j, "skeleton", ctx), ctx + ".skeleton");
  try {
    m.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_input)
      fail_input(ctx + ": " + e.what());
    throw;
  }
  return m;
}

json model_to_json(const BodyModel& model) {
  json verts = json::array();
  for (const Vec3& v : model.template_vertices) verts.push_back(from_vec3(v));
  json faces = json::array();
  for (const Eigen::Vector3i& f : model.faces)
    faces.push_back(json::array({f[0], f[1], f[2]}));
  json shapes = json::array();
  for (const auto& shape : model.blendshapes) {
    json disp = json::array();
    for (const Vec3& d : shape) disp.push_back(from_vec3(d));
    shapes.push_back(std::move(disp));
  }
  json regressor = json::array();
  for (const WeightRow& row : model.joint_regressor)
    regressor.push_back(weight_row_to_json(row));
  json weights = json::array();
  for (const WeightRow& row : model.skin_weights)
    weights.push_back(weight_row_to_json(row));
  return json{{"vertices", verts},
              {"faces", faces},
              {"blendshapes", shapes},
              {"joint_regressor", regressor},
              {"skin_weights", weights},
              {"skeleton", tree_to_json(model.tree)}};
}

std::string resolve_ref(const std::string& scenario_path,
                        const std::string& ref) {
  namespace fs = std::filesystem;
  const fs::path p(ref);
  if (p.is_absolute()) return ref;
  return (fs::path(scenario_path).parent_path() / p).string();
}

}  // namespace

KinematicTree load_tree(const std::string& path) {
  return tree_from_json(parse_json_file(path), path);
}

void save_tree(const KinematicTree& tree, const std::string& path) {
  write_json_file(tree_to_json(tree), path);
}

Pose load_pose(const std::string& path) {
  return pose_from_json(parse_json_file(path), path);
}

void save_pose(const Pose& pose, const std::string& path) {
  write_json_file(pose_to_json(pose), path);
}

TwistAngles load_twists(const std::string& path) {
  return twists_from_json(parse_json_file(path), path);
}

void save_twists(const TwistAngles& twists, const std::string& path) {
  write_json_file(twists_to_json(twists), path);
}

PerspectiveCamera load_camera(const std::string& path) {
  return camera_from_json(parse_json_file(path), path);
}

void save_camera(const PerspectiveCamera& camera, const std::string& path) {
  write_json_file(camera_to_json(camera, path), path);
}

ImageKeypoints load_keypoints(const std::string& path) {
  return keypoints_from_json(parse_json_file(path), path);
}

void save_keypoints(const ImageKeypoints& keypoints, const std::string& path) {
  write_json_file(keypoints_to_json(keypoints), path);
}

LandmarkFile load_landmarks(const std::string& path) {
  return landmarks_from_json(parse_json_file(path), path);
}

void save_landmarks(const LandmarkFile& landmarks, const std::string& path) {
  write_json_file(landmarks_to_json(landmarks, path), path);
}

LandmarkSemanticMap load_semantic_map(const std::string& path) {
  const json j = parse_json_file(path);
  as_object(j, path);
  LandmarkSemanticMap map;
  for (const auto& [category, entries] : j.items()) {
    const std::string cc = path + "." + category;
    as_object(entries, cc);
    auto& target = map.categories[category];
    for (const auto& [measurement, pair] : entries.items()) {
      const std::string mc = cc + "." + measurement;
      try {
        measure_from_name(measurement);
      } catch (const Error& e) {
        fail_input(mc + ": " + e.what());
      }
      const json& labels = as_array(pair, mc);
      if (labels.size() != 2)
        fail_input(mc + " must hold two landmark labels");
      target[measurement] = {as_string(labels[0], mc + "[0]"),
                             as_string(labels[1], mc + "[1]")};
    }
  }
  return map;
}

void save_semantic_map(const LandmarkSemanticMap& map,
                       const std::string& path) {
  json j = json::object();
  for (const auto& [category, entries] : map.categories) {
    json cat = json::object();
    for (const auto& [measurement, labels] : entries)
      cat[measurement] = json::array({labels.first, labels.second});
    j[category] = std::move(cat);
  }
  write_json_file(j, path);
}

BodyModel load_model(const std::string& path) {
  return model_from_json(parse_json_file(path), path);
}

void save_model(const BodyModel& model, const std::string& path) {
  write_json_file(model_to_json(model), path);
}

PoseDatabase load_pose_database(const std::string& path) {
  std::ifstream ifs(path, std::ios::binary);
  if (!ifs) fail_io("cannot open " + path);
  PoseDatabase db;
  std::string line;
  int line_no = 0;
  while (std::getline(ifs, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_input(ctx + ": " + e.what());
    }
    PoseDatabase::Entry entry;
    entry.tag = as_string(require(rec, "tag", ctx), ctx + ".tag");
    entry.pose = pose_from_json(rec, ctx);
    db.entries.push_back(std::move(entry));
  }
  return db;
}

void save_pose_database(const PoseDatabase& db, const std::string& path) {
  std::string out;
  for (const PoseDatabase::Entry& entry : db.entries) {
    json rec = pose_to_json(entry.pose);
    rec["tag"] = entry.tag;
    out += rec.dump();
    out += "\n";
  }
  write_text_file(path, out);
}

Eigen::VectorXd load_shape_vector(const std::string& path) {
  const json j = parse_json_file(path);
  return vector_from_json(require(j, "beta", path), path + ".beta");
}

void save_shape_vector(const Eigen::VectorXd& beta, const std::string& path) {
  write_json_file(json{{"beta", vector_to_json(beta)}}, path);
}

Vec3 load_translation(const std::string& path) {
  const json j = parse_json_file(path);
  return as_vec3(require(j, "translation", path), path + ".translation");
}

void save_translation(const Vec3& translation, const std::string& path) {
  write_json_file(json{{"translation", from_vec3(translation)}}, path);
}

Scenario load_scenario(const std::string& path) {
  const json j = parse_json_file(path);
  Scenario sc;
  sc.camera = camera_from_json(require(j, "camera", path), path + ".camera");
  sc.skeleton_ref = as_string(require(j, "skeleton", path), path + ".skeleton");
  sc.model_ref = as_string(require(j, "model", path), path + ".model");
  sc.tree = load_tree(resolve_ref(path, sc.skeleton_ref));
  sc.model = load_model(resolve_ref(path, sc.model_ref));
  sc.image_joints = keypoints_from_json(require(j, "image_joints", path),
                                        path + ".image_joints");
  sc.twists = twists_from_json(require(j, "twists", path), path + ".twists");
  if (j.contains("depth_offsets") && !j["depth_offsets"].is_null())
    sc.depth_offsets =
        as_double_vector(j["depth_offsets"], path + ".depth_offsets");
  if (j.contains("landmarks") && !j["landmarks"].is_null())
    sc.landmarks = landmarks_from_json(j["landmarks"], path + ".landmarks");
  const json& mask = as_array(require(j, "cloth_mask", path),
                              path + ".cloth_mask");
  for (std::size_t k = 0; k < mask.size(); ++k)
    sc.cloth_mask.covered.push_back(
        as_bool(mask[k], elem(path + ".cloth_mask", k)));
  if (j.contains("ground_truth") && !j["ground_truth"].is_null()) {
    const json& gt = as_object(j["ground_truth"], path + ".ground_truth");
    const std::string gc = path + ".ground_truth";
    if (gt.contains("pose") && !gt["pose"].is_null())
      sc.ground_truth.pose = pose_from_json(gt["pose"], gc + ".pose");
    if (gt.contains("beta") && !gt["beta"].is_null())
      sc.ground_truth.beta = vector_from_json(gt["beta"], gc + ".beta");
    if (gt.contains("translation") && !gt["translation"].is_null())
      sc.ground_truth.translation =
          as_vec3(gt["translation"], gc + ".translation");
  }

  const int n = sc.tree.joint_count();
  if (sc.model.joint_count() != n)
    fail_input(path + ": skeleton has " + std::to_string(n) +
               " joints but the model skeleton has " +
               std::to_string(sc.model.joint_count()));
  for (int k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    if (sc.tree.name[idx] != sc.model.tree.name[idx])
      fail_input(path + ": skeleton and model joint names differ at index " +
                 std::to_string(k));
  }
  if (sc.image_joints.joint_count() != n)
    fail_input(path + ": image_joints holds " +
               std::to_string(sc.image_joints.joint_count()) +
               " points for " + std::to_string(n) + " joints");
  if (sc.twists.count() != n - 1)
    fail_input(path + ": twists.phi needs one entry per non-root joint (" +
               std::to_string(n - 1) + "), got " +
               std::to_string(sc.twists.count()));
  if (sc.cloth_mask.joint_count() != n)
    fail_input(path + ": cloth_mask holds " +
               std::to_string(sc.cloth_mask.joint_count()) +
               " flags for " + std::to_string(n) + " joints");
  if (sc.depth_offsets.empty())
    sc.depth_offsets.assign(static_cast<std::size_t>(n), 0.0);
  else if (static_cast<int>(sc.depth_offsets.size()) != n)
    fail_input(path + ": depth_offsets holds " +
               std::to_string(sc.depth_offsets.size()) + " values for " +
               std::to_string(n) + " joints");
  if (sc.ground_truth.pose && sc.ground_truth.pose->joint_count() != n)
    fail_input(path + ": ground_truth.pose joint count differs from the "
                      "skeleton");
  if (sc.ground_truth.beta &&
      static_cast<int>(sc.ground_truth.beta->size()) != sc.model.shape_dims())
    fail_input(path + ": ground_truth.beta size differs from the model shape "
                      "dimensions");
  return sc;
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  json j;
  j["camera"] = camera_to_json(scenario.camera, path + ".camera");
  j["skeleton"] = scenario.skeleton_ref;
  j["model"] = scenario.model_ref;
  j["image_joints"] = keypoints_to_json(scenario.image_joints);
  j["depth_offsets"] = scenario.depth_offsets;
  j["twists"] = twists_to_json(scenario.twists);
  if (scenario.landmarks)
    j["landmarks"] = landmarks_to_json(*scenario.landmarks,
                                       path + ".landmarks");
  json mask = json::array();
  for (int k = 0; k < scenario.cloth_mask.joint_count(); ++k)
    mask.push_back(
        static_cast<bool>(scenario.cloth_mask.covered[static_cast<std::size_t>(k)]));
  j["cloth_mask"] = mask;
  if (scenario.ground_truth.any()) {
    json gt = json::object();
    if (scenario.ground_truth.pose)
      gt["pose"] = pose_to_json(*scenario.ground_truth.pose);
    if (scenario.ground_truth.beta)
      gt["beta"] = vector_to_json(*scenario.ground_truth.beta);
    if (scenario.ground_truth.translation)
      gt["translation"] = from_vec3(*scenario.ground_truth.translation);
    j["ground_truth"] = std::move(gt);
  }
  write_json_file(j, path);
}

PipelineConfig load_config(const std::string& path) {
  const json j = parse_json_file(path);
  as_object(j, path);
  PipelineConfig cfg;
  if (j.contains("camera") && !j["camera"].is_null())
    cfg.camera = camera_from_json(j["camera"], path + ".camera");
  if (j.contains("anchors") && !j["anchors"].is_null()) {
    const json& anchors = as_array(j["anchors"], path + ".anchors");
    cfg.anchors.bones.clear();
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      const std::string ac = elem(path + ".anchors", k);
      const json& bone = as_array(anchors[k], ac);
      if (bone.size() != 2) fail_input(ac + " must hold two joint names");
      cfg.anchors.bones.emplace_back(as_string(bone[0], ac + "[0]"),
                                     as_string(bone[1], ac + "[1]"));
    }
    if (cfg.anchors.bones.empty())
      fail_input(path + ".anchors must name at least one bone");
  }
  if (j.contains("covered_weight"))
    cfg.covered_weight = as_number(j["covered_weight"], path + ".covered_weight");
  if (j.contains("uncovered_weight"))
    cfg.uncovered_weight =
        as_number(j["uncovered_weight"], path + ".uncovered_weight");
  if (cfg.covered_weight < 0.0 || cfg.uncovered_weight < 0.0)
    fail_input(path + ": joint weights must be nonnegative");
  if (j.contains("bands") && !j["bands"].is_null()) {
    const json& bands = as_object(j["bands"], path + ".bands");
    if (bands.contains("chest"))
      cfg.bands.chest = as_number(bands["chest"], path + ".bands.chest");
    if (bands.contains("waist"))
      cfg.bands.waist = as_number(bands["waist"], path + ".bands.waist");
    if (bands.contains("hips"))
      cfg.bands.hips = as_number(bands["hips"], path + ".bands.hips");
    if (bands.contains("half_thickness"))
      cfg.bands.half_thickness =
          as_number(bands["half_thickness"], path + ".bands.half_thickness");
    for (double frac : {cfg.bands.chest, cfg.bands.waist, cfg.bands.hips})
      if (!(frac > 0.0 && frac < 1.0))
        fail_input(path + ".bands fractions must lie in (0, 1)");
    if (!(cfg.bands.half_thickness > 0.0))
      fail_input(path + ".bands.half_thickness must be positive");
  }
  if (j.contains("landmark_map") && !j["landmark_map"].is_null())
    cfg.landmark_map_path =
        as_string(j["landmark_map"], path + ".landmark_map");
  return cfg;
}

namespace {

json measurement_entries_json(const MeasurementVector& measurements) {
  json entries = json::object();
  for (int i = 0; i < kMeasureCount; ++i) {
    const auto m = static_cast<Measure>(i);
    json e;
    e["present"] = measurements.has(m);
    e["value"] = measurements.has(m) ? json(measurements[m]) : json(nullptr);
    entries[measure_name(m)] = std::move(e);
  }
  return entries;
}

MeasurementVector measurement_entries_from_json(const json& entries,
                                                const std::string& ctx) {
  as_object(entries, ctx);
  MeasurementVector out;
  for (int i = 0; i < kMeasureCount; ++i) {
    const auto m = static_cast<Measure>(i);
    const char* name = measure_name(m);
    if (!entries.contains(name)) continue;
    const std::string ec = ctx + "." + name;
    const json& e = as_object(entries[name], ec);
    if (!as_bool(require(e, "present", ec), ec + ".present")) continue;
    out.set(m, as_number(require(e, "value", ec), ec + ".value"));
  }
  return out;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json shape_errors_to_json(const MeasurementVector& s) {
  return json{{"height", s[Measure::height]},
              {"chest", s[Measure::chest_width]},
              {"waist", s[Measure::waist_width]},
              {"hips", s[Measure::hips_width]}};
}

json metric_report_to_json(const MetricReport& report) {
  json j;
  j["mpjpe_c_mm"] = optional_number(report.mpjpe_c_mm);
  j["pa_mpjpe_c_mm"] = optional_number(report.pa_mpjpe_c_mm);
  j["kpe2d_px"] = optional_number(report.kpe2d_px);
  j["shape_errors_mm"] = report.shape_errors_mm
                             ? shape_errors_to_json(*report.shape_errors_mm)
                             : json(nullptr);
  return j;
}

MetricReport metric_report_from_json(const json& j, const std::string& ctx) {
  MetricReport report;
  const auto number_field = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return as_number(j[key], ctx + "." + key);
  };
  report.mpjpe_c_mm = number_field("mpjpe_c_mm");
  report.pa_mpjpe_c_mm = number_field("pa_mpjpe_c_mm");
  report.kpe2d_px = number_field("kpe2d_px");
  if (j.contains("shape_errors_mm") && !j["shape_errors_mm"].is_null()) {
    const std::string sc = ctx + ".shape_errors_mm";
    const json& s = as_object(j["shape_errors_mm"], sc);
    MeasurementVector mv;
    mv.set(Measure::height, as_number(require(s, "height", sc), sc + ".height"));
    mv.set(Measure::chest_width,
           as_number(require(s, "chest", sc), sc + ".chest"));
    mv.set(Measure::waist_width,
           as_number(require(s, "waist", sc), sc + ".waist"));
    mv.set(Measure::hips_width, as_number(require(s, "hips", sc), sc + ".hips"));
    report.shape_errors_mm = mv;
  }
  return report;
}

}  // namespace

void save_measurement_report(const MeasurementVector& measurements,
                             const std::string& path) {
  write_json_file(json{{"measurements", measurement_entries_json(measurements)}},
                  path);
}

MeasurementVector load_measurement_report(const std::string& path) {
  const json j = parse_json_file(path);
  return measurement_entries_from_json(require(j, "measurements", path),
                                       path + ".measurements");
}

void save_fit_report(const FitReport& report, const std::string& path) {
  json j;
  j["depth"] = report.depth;
  j["measurements"] = measurement_entries_json(report.measurements);
  j["metrics"] = report.metrics ? metric_report_to_json(*report.metrics)
                                : json(nullptr);
  write_json_file(j, path);
}

FitReport load_fit_report(const std::string& path) {
  const json j = parse_json_file(path);
  FitReport report;
  report.depth = as_number(require(j, "depth", path), path + ".depth");
  report.measurements = measurement_entries_from_json(
      require(j, "measurements", path), path + ".measurements");
  if (j.contains("metrics") && !j["metrics"].is_null())
    report.metrics =
        metric_report_from_json(as_object(j["metrics"], path + ".metrics"),
                                path + ".metrics");
  return report;
}

void save_metric_report_json(const MetricReport& report,
                             const std::string& path) {
  write_json_file(metric_report_to_json(report), path);
}

void save_metric_report_csv(const MetricReport& report,
                            const std::string& path) {
  const auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  std::string out =
      "mpjpe_c_mm,pa_mpjpe_c_mm,kpe2d_px,height_mm,chest_mm,waist_mm,hips_mm\n";
  out += cell(report.mpjpe_c_mm) + "," + cell(report.pa_mpjpe_c_mm) + "," +
         cell(report.kpe2d_px);
  if (report.shape_errors_mm) {
    const MeasurementVector& s = *report.shape_errors_mm;
    out += "," + format_double(s[Measure::height]) + "," +
           format_double(s[Measure::chest_width]) + "," +
           format_double(s[Measure::waist_width]) + "," +
           format_double(s[Measure::hips_width]);
  } else {
    out += ",,,,";
  }
  out += "\n";
  write_text_file(path, out);
}

MetricReport load_metric_report(const std::string& path) {
  return metric_report_from_json(parse_json_file(path), path);
}

}  // namespace c2b
