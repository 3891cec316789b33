#include "c2b/c2b.h"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "c2b/error.hpp"
#include "c2b/pipeline.hpp"

struct c2b_model {
  c2b::BodyModel model;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
c2b_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return C2B_OK;
  } catch (const c2b::Error& e) {
    g_last_error = e.what();
    return static_cast<c2b_status>(e.exit_code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return C2B_ERROR_NUMERIC;
  }
}

void require_arg(const void* ptr, const char* what) {
  if (!ptr) c2b::fail_input(std::string(what) + " is required");
}

c2b::ShapeParams shape_from(const c2b::BodyModel& model, const double* beta,
                            int beta_len) {
  if (beta_len != model.shape_dims())
    c2b::fail_input("shape vector has " + std::to_string(beta_len) +
                    " entries, the model has " +
                    std::to_string(model.shape_dims()) + " shape dims");
  c2b::ShapeParams shape = c2b::ShapeParams::zero(beta_len);
  for (int i = 0; i < beta_len; ++i) shape.beta[i] = beta[i];
  return shape;
}

c2b::AnchorBoneSet parse_anchor_list(const std::string& text) {
  c2b::AnchorBoneSet anchors;
  anchors.bones.clear();
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string entry = text.substr(start, comma - start);
    const std::size_t colon = entry.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == entry.size())
      c2b::fail_input("anchor list entry '" + entry +
                      "' is not of the form parent:child");
    anchors.bones.emplace_back(entry.substr(0, colon), entry.substr(colon + 1));
    start = comma + 1;
  }
  if (anchors.bones.empty()) c2b::fail_input("anchor list is empty");
  return anchors;
}

c2b::PipelineConfig config_from(const char* config_path) {
  if (!config_path) return c2b::PipelineConfig{};
  return c2b::load_config(config_path);
}

c2b::FitOptions fit_options_from(const char* config_path, const char* anchors,
                                 double temperature, uint64_t seed) {
  const c2b::PipelineConfig config = config_from(config_path);
  c2b::FitOptions options;
  options.anchors = config.anchors;
  options.bands = config.bands;
  if (!config.landmark_map_path.empty()) {
    std::filesystem::path map_path = config.landmark_map_path;
    if (map_path.is_relative() && config_path)
      map_path = std::filesystem::path(config_path).parent_path() / map_path;
    options.semantic_map = c2b::load_semantic_map(map_path.string());
  }
  options.temperature = temperature;
  options.seed = seed;
  if (anchors && *anchors) options.anchors = parse_anchor_list(anchors);
  return options;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

nlohmann::json peek_json(const std::string& path) {
  std::ifstream ifs(path, std::ios::binary);
  if (!ifs) c2b::fail_io("cannot open " + path);
  try {
    return nlohmann::json::parse(ifs);
  } catch (const nlohmann::json::parse_error& e) {
    c2b::fail_input(path + ": " + e.what());
  }
}

}  // namespace

extern "C" {

const char* c2b_last_error(void) { return g_last_error.c_str(); }

c2b_status c2b_model_synth(uint64_t seed, int joint_count, int shape_dims,
                           int vertex_budget, c2b_model** out) {
  return guarded([&] {
    require_arg(out, "output model pointer");
    *out = nullptr;
    auto handle = std::make_unique<c2b_model>();
    handle->model =
        c2b::synth_body_model(joint_count, shape_dims, vertex_budget, seed);
    *out = handle.release();
  });
}

c2b_status c2b_model_load(const char* path, c2b_model** out) {
  return guarded([&] {
    require_arg(path, "model path");
    require_arg(out, "output model pointer");
    *out = nullptr;
    auto handle = std::make_unique<c2b_model>();
    handle->model = c2b::load_model(path);
    *out = handle.release();
  });
}

void c2b_model_release(c2b_model* model) { delete model; }

int c2b_model_vertex_count(const c2b_model* model) {
  return model ? model->model.vertex_count() : 0;
}

int c2b_model_joint_count(const c2b_model* model) {
  return model ? model->model.joint_count() : 0;
}

int c2b_model_shape_dims(const c2b_model* model) {
  return model ? model->model.shape_dims() : 0;
}

c2b_status c2b_model_rest_joints(const c2b_model* model, const double* beta,
                                 int beta_len, double* out_xyz) {
  return guarded([&] {
    require_arg(model, "model");
    require_arg(beta, "shape vector");
    require_arg(out_xyz, "output buffer");
    const c2b::JointSet joints =
        c2b::rest_joints(model->model, shape_from(model->model, beta, beta_len));
    for (std::size_t k = 0; k < joints.positions.size(); ++k) {
      out_xyz[3 * k + 0] = joints.positions[k].x();
      out_xyz[3 * k + 1] = joints.positions[k].y();
      out_xyz[3 * k + 2] = joints.positions[k].z();
    }
  });
}

c2b_status c2b_model_skin(const c2b_model* model, const double* beta,
                          int beta_len, const double* rotations,
                          const double* root_translation, double* out_xyz) {
  return guarded([&] {
    require_arg(model, "model");
    require_arg(beta, "shape vector");
    require_arg(rotations, "rotations");
    require_arg(root_translation, "root translation");
    require_arg(out_xyz, "output buffer");
    const int n = model->model.joint_count();
    c2b::Pose pose = c2b::Pose::identity(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          pose.rotations[static_cast<std::size_t>(k)](i, j) =
              rotations[9 * k + 3 * i + j];
    pose.root_translation = c2b::Vec3(root_translation[0], root_translation[1],
                                      root_translation[2]);
    const c2b::Mesh mesh = c2b::skin(
        model->model, shape_from(model->model, beta, beta_len), pose);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      out_xyz[3 * v + 0] = mesh.vertices[v].x();
      out_xyz[3 * v + 1] = mesh.vertices[v].y();
      out_xyz[3 * v + 2] = mesh.vertices[v].z();
    }
  });
}

c2b_status c2b_synth_run(uint64_t seed, int pose_db_size, const char* category,
                         const char* config_path, const char* out_dir) {
  return guarded([&] {
    require_arg(category, "clothing category");
    require_arg(out_dir, "output directory");
    c2b::SynthOptions options;
    options.seed = seed;
    options.pose_db_size = pose_db_size;
    options.category = category;
    if (config_path) options.camera = c2b::load_config(config_path).camera;
    c2b::write_synth_result(c2b::synth_scenario(options), out_dir);
  });
}

c2b_status c2b_fit_run(const char* scenario_path, const char* config_path,
                       const char* anchors, double temperature, uint64_t seed,
                       const char* out_dir) {
  return guarded([&] {
    require_arg(scenario_path, "scenario path");
    require_arg(out_dir, "output directory");
    const c2b::Scenario scenario = c2b::load_scenario(scenario_path);
    const c2b::FitOptions options =
        fit_options_from(config_path, anchors, temperature, seed);
    c2b::write_fit_result(c2b::fit_scenario(scenario, options), out_dir);
  });
}

c2b_status c2b_evolve_run(const char* scenario_path, const char* db_path,
                          const char* config_path, int count, int k,
                          double epsilon, uint64_t seed, const char* out_dir) {
  return guarded([&] {
    require_arg(scenario_path, "scenario path");
    require_arg(db_path, "pose database path");
    require_arg(out_dir, "output directory");
    const c2b::Scenario scenario = c2b::load_scenario(scenario_path);
    const c2b::PoseDatabase db = c2b::load_pose_database(db_path);
    c2b::EvolveOptions options;
    options.count = count;
    options.k = k;
    options.epsilon = epsilon;
    options.seed = seed;
    options.fit = fit_options_from(config_path, nullptr, 0.0, seed);
    c2b::write_evolve_result(c2b::evolve_scenario(scenario, db, options),
                             out_dir);
  });
}

c2b_status c2b_eval_run(const char* pred_dir, const char* scenario_path,
                        const char* out_path) {
  return guarded([&] {
    require_arg(pred_dir, "prediction directory");
    require_arg(scenario_path, "scenario path");
    require_arg(out_path, "output path");
    const c2b::Scenario scenario = c2b::load_scenario(scenario_path);
    const c2b::Pose pose = c2b::load_pose(join(pred_dir, "pose.json"));
    const Eigen::VectorXd beta =
        c2b::load_shape_vector(join(pred_dir, "beta.json"));
    const c2b::MetricReport report =
        c2b::evaluate_prediction(scenario, pose, beta);
    std::string base = out_path;
    const std::string suffix = ".json";
    if (base.size() > suffix.size() &&
        base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0)
      base.resize(base.size() - suffix.size());
    c2b::save_metric_report_json(report, base + ".json");
    c2b::save_metric_report_csv(report, base + ".csv");
  });
}

c2b_status c2b_measure_run(const char* input_path, const char* model_path,
                           const char* config_path, const char* const* edits,
                           int edit_count, int write_mesh,
                           const char* out_dir) {
  return guarded([&] {
    require_arg(input_path, "input path");
    require_arg(out_dir, "output directory");
    if (edit_count > 0) require_arg(edits, "edit list");
    std::vector<c2b::MeasureEdit> parsed;
    parsed.reserve(static_cast<std::size_t>(edit_count));
    for (int i = 0; i < edit_count; ++i) {
      require_arg(edits[i], "edit string");
      parsed.push_back(c2b::parse_measure_edit(edits[i]));
    }

    const nlohmann::json root = peek_json(input_path);
    if (root.is_object() && root.contains("image_joints")) {
      const c2b::Scenario scenario = c2b::load_scenario(input_path);
      const c2b::FitOptions options =
          fit_options_from(config_path, nullptr, 0.0, 0);
      const c2b::MeasureResult result =
          c2b::measure_scenario(scenario, parsed, options);
      c2b::write_measure_result(result, scenario.model, out_dir,
                                write_mesh != 0);
    } else if (root.is_object() && root.contains("beta")) {
      require_arg(model_path, "model path (measuring a bare shape vector)");
      const c2b::BodyModel model = c2b::load_model(model_path);
      c2b::ShapeParams beta;
      beta.beta = c2b::load_shape_vector(input_path);
      const c2b::MeasurementBands bands = config_from(config_path).bands;
      const c2b::MeasureResult result =
          c2b::measure_shape(model, beta, parsed, bands);
      c2b::write_measure_result(result, model, out_dir, write_mesh != 0);
    } else {
      c2b::fail_input(std::string(input_path) +
                      ": neither a scenario nor a shape vector");
    }
  });
}

c2b_status c2b_export_mesh_run(const char* model_path, const char* beta_path,
                               const char* pose_path, const char* out_path) {
  return guarded([&] {
    require_arg(model_path, "model path");
    require_arg(beta_path, "shape vector path");
    require_arg(out_path, "output path");
    const c2b::BodyModel model = c2b::load_model(model_path);
    c2b::ShapeParams beta;
    beta.beta = c2b::load_shape_vector(beta_path);
    if (beta.dims() != model.shape_dims())
      c2b::fail_input("shape vector has " + std::to_string(beta.dims()) +
                      " entries, the model has " +
                      std::to_string(model.shape_dims()) + " shape dims");
    const c2b::Mesh mesh =
        pose_path ? c2b::skin(model, beta, c2b::load_pose(pose_path))
                  : c2b::shape_mesh(model, beta);
    c2b::export_obj(mesh, out_path);
  });
}

}  // extern "C"
