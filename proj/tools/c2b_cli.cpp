#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <c2b/c2b.h>

namespace {

int finish(c2b_status status) {
  if (status != C2B_OK) std::fprintf(stderr, "error: %s\n", c2b_last_error());
  return static_cast<int>(status);
}

const char* opt(const std::string& value) {
  return value.empty() ? nullptr : value.c_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Posed, shaped, camera-placed body meshes from image keypoints, twist "
      "angles and clothing landmarks"};
  app.require_subcommand(1);

  std::string synth_out, synth_category = "bodysuit", synth_config;
  std::uint64_t synth_seed = 0;
  int synth_db_size = 8;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate a synthetic scenario with ground truth");
  synth->add_option("out_dir", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--pose-db-size", synth_db_size, "Pose database entries");
  synth->add_option("--category", synth_category, "Clothing category");
  synth->add_option("--config", synth_config, "Pipeline config JSON");

  std::string fit_scenario, fit_out, fit_anchors, fit_config;
  double fit_temperature = 0.0;
  std::uint64_t fit_seed = 0;
  CLI::App* fit =
      app.add_subcommand("fit", "Fit pose, shape and placement to a scenario");
  fit->add_option("scenario", fit_scenario, "Scenario JSON")->required();
  fit->add_option("out_dir", fit_out, "Output directory")->required();
  fit->add_option("--anchors", fit_anchors,
                  "Depth anchor bones as parent:child,parent:child");
  fit->add_option("--temperature", fit_temperature,
                  "Shape posterior sampling temperature");
  fit->add_option("--seed", fit_seed, "Random seed");
  fit->add_option("--config", fit_config, "Pipeline config JSON");

  std::string evolve_scenario, evolve_db, evolve_out, evolve_config;
  int evolve_count = 1, evolve_k = 5;
  double evolve_epsilon = 0.0;
  std::uint64_t evolve_seed = 0;
  CLI::App* evolve = app.add_subcommand(
      "evolve", "Generate pose variants that keep the clothed region");
  evolve->add_option("scenario", evolve_scenario, "Scenario JSON")->required();
  evolve->add_option("database", evolve_db, "Pose database JSONL")->required();
  evolve->add_option("out_dir", evolve_out, "Output directory")->required();
  evolve->add_option("--count", evolve_count, "Variants to emit");
  evolve->add_option("--k", evolve_k, "Nearest donors to cycle through");
  evolve->add_option("--epsilon", evolve_epsilon,
                     "Per-joint mutation bound, radians");
  evolve->add_option("--seed", evolve_seed, "Random seed");
  evolve->add_option("--config", evolve_config, "Pipeline config JSON");

  std::string measure_input, measure_out, measure_model, measure_config;
  std::vector<std::string> measure_edits;
  bool measure_mesh = false;
  CLI::App* measure = app.add_subcommand(
      "measure", "Report body measurements, optionally editing them");
  measure->add_option("input", measure_input,
                      "Scenario JSON or shape vector JSON")
      ->required();
  measure->add_option("out_dir", measure_out, "Output directory")->required();
  measure->add_option("--edit", measure_edits,
                      "Replace a measurement, as name=value meters");
  measure->add_option("--model", measure_model,
                      "Model JSON (required for bare shape vectors)");
  measure->add_flag("--mesh", measure_mesh, "Also export the refit mesh");
  measure->add_option("--config", measure_config, "Pipeline config JSON");

  std::string eval_pred, eval_scenario, eval_out;
  CLI::App* eval = app.add_subcommand(
      "eval", "Score a fitted prediction against a scenario's ground truth");
  eval->add_option("pred_dir", eval_pred, "Directory written by fit")
      ->required();
  eval->add_option("scenario", eval_scenario, "Scenario JSON")->required();
  eval->add_option("out", eval_out, "Report path (.json; .csv written too)")
      ->required();

  std::string export_model, export_beta, export_pose, export_out;
  CLI::App* export_mesh =
      app.add_subcommand("export-mesh", "Skin a model at a shape and pose");
  export_mesh->add_option("model", export_model, "Model JSON")->required();
  export_mesh->add_option("beta", export_beta, "Shape vector JSON")->required();
  export_mesh->add_option("out", export_out, "Output OBJ path")->required();
  export_mesh->add_option("--pose", export_pose,
                          "Pose JSON (rest pose if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (synth->parsed())
    return finish(c2b_synth_run(synth_seed, synth_db_size,
                                synth_category.c_str(), opt(synth_config),
                                synth_out.c_str()));
  if (fit->parsed())
    return finish(c2b_fit_run(fit_scenario.c_str(), opt(fit_config),
                              opt(fit_anchors), fit_temperature, fit_seed,
                              fit_out.c_str()));
  if (evolve->parsed())
    return finish(c2b_evolve_run(evolve_scenario.c_str(), evolve_db.c_str(),
                                 opt(evolve_config), evolve_count, evolve_k,
                                 evolve_epsilon, evolve_seed,
                                 evolve_out.c_str()));
  if (measure->parsed()) {
    std::vector<const char*> edits;
    edits.reserve(measure_edits.size());
    for (const std::string& edit : measure_edits) edits.push_back(edit.c_str());
    return finish(c2b_measure_run(
        measure_input.c_str(), opt(measure_model), opt(measure_config),
        edits.empty() ? nullptr : edits.data(),
        static_cast<int>(edits.size()), measure_mesh ? 1 : 0,
        measure_out.c_str()));
  }
  if (eval->parsed())
    return finish(c2b_eval_run(eval_pred.c_str(), eval_scenario.c_str(),
                               eval_out.c_str()));
  if (export_mesh->parsed())
    return finish(c2b_export_mesh_run(export_model.c_str(),
                                      export_beta.c_str(), opt(export_pose),
                                      export_out.c_str()));
  return 2;
}
