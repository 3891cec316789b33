#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "c2b/pipeline.hpp"

using namespace c2b;

namespace {

std::string fresh_dir() {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("c2b_cli_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string read_file(const std::string& path) {
  std::ifstream ifs(path, std::ios::binary);
  REQUIRE(ifs.good());
  std::ostringstream oss;
  oss << ifs.rdbuf();
  return oss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + C2B_CLI_PATH + "\" " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void check_same_files(const std::string& dir_a, const std::string& dir_b,
                      const std::vector<std::string>& names) {
  for (const std::string& name : names) {
    INFO("file ", name);
    CHECK(read_file(dir_a + "/" + name) == read_file(dir_b + "/" + name));
  }
}

}  // namespace

TEST_CASE("cli runs are deterministic and equal the library") {
  const std::string first = fresh_dir();
  const std::string second = fresh_dir();
  REQUIRE(run_cli("synth " + first + " --seed 12 --pose-db-size 3") == 0);
  REQUIRE(run_cli("synth " + second + " --seed 12 --pose-db-size 3") == 0);
  const std::vector<std::string> synth_files = {
      "skeleton.json", "model.json", "scenario.json", "pose_db.jsonl"};
  check_same_files(first, second, synth_files);

  SynthOptions opt;
  opt.seed = 12;
  opt.pose_db_size = 3;
  const std::string lib = fresh_dir();
  write_synth_result(synth_scenario(opt), lib);
  check_same_files(first, lib, synth_files);

  const std::string fit_a = fresh_dir();
  const std::string fit_b = fresh_dir();
  REQUIRE(run_cli("fit " + first + "/scenario.json " + fit_a) == 0);
  REQUIRE(run_cli("fit " + second + "/scenario.json " + fit_b) == 0);
  const std::vector<std::string> fit_files = {
      "pose.json", "beta.json", "translation.json", "mesh.obj", "report.json"};
  check_same_files(fit_a, fit_b, fit_files);
  const std::string lib_fit = fresh_dir();
  write_fit_result(fit_scenario(load_scenario(lib + "/scenario.json")),
                   lib_fit);
  check_same_files(fit_a, lib_fit, fit_files);

  const std::string evo_a = fresh_dir();
  const std::string evo_b = fresh_dir();
  const std::string evolve_args =
      "/pose_db.jsonl --count 2 --epsilon 0.02 --seed 6 --k 2 ";
  REQUIRE(run_cli("evolve " + first + "/scenario.json " + first + evolve_args +
                  evo_a) == 0);
  REQUIRE(run_cli("evolve " + second + "/scenario.json " + second +
                  evolve_args + evo_b) == 0);
  check_same_files(evo_a, evo_b,
                   {"variant_000.pose.json", "variant_000.obj",
                    "variant_001.pose.json", "variant_001.obj"});

  const std::string eval_dir = fresh_dir();
  REQUIRE(run_cli("eval " + fit_a + " " + first + "/scenario.json " +
                  eval_dir + "/metrics.json") == 0);
  CHECK(std::filesystem::exists(eval_dir + "/metrics.json"));
  CHECK(std::filesystem::exists(eval_dir + "/metrics.csv"));
  const MetricReport report = load_metric_report(eval_dir + "/metrics.json");
  REQUIRE(report.mpjpe_c_mm.has_value());
  CHECK(*report.mpjpe_c_mm < 1e-3);
  REQUIRE(report.kpe2d_px.has_value());
  CHECK(*report.kpe2d_px < 1e-3);

  const std::string exported = fresh_dir();
  REQUIRE(run_cli("export-mesh " + first + "/model.json " + fit_a +
                  "/beta.json " + exported + "/mesh.obj --pose " + fit_a +
                  "/pose.json") == 0);
  CHECK(read_file(exported + "/mesh.obj") == read_file(fit_a + "/mesh.obj"));
}

TEST_CASE("cli identity edit reproduces the fitted shape bytes") {
  const std::string dir = fresh_dir();
  REQUIRE(run_cli("synth " + dir + " --seed 3") == 0);
  const std::string fit_dir = fresh_dir();
  REQUIRE(run_cli("fit " + dir + "/scenario.json " + fit_dir) == 0);
  const std::string measure_dir = fresh_dir();
  REQUIRE(run_cli("measure " + dir + "/scenario.json " + measure_dir) == 0);
  CHECK(read_file(measure_dir + "/beta.json") ==
        read_file(fit_dir + "/beta.json"));
  CHECK_FALSE(std::filesystem::exists(measure_dir + "/mesh.obj"));

  const std::string edited_dir = fresh_dir();
  REQUIRE(run_cli("measure " + dir + "/scenario.json " + edited_dir +
                  " --edit leg_length=0.9 --edit waist_width=0.5 --mesh") ==
          0);
  CHECK(std::filesystem::exists(edited_dir + "/mesh.obj"));
  CHECK(read_file(edited_dir + "/beta.json") !=
        read_file(fit_dir + "/beta.json"));

  const std::string shape_dir = fresh_dir();
  REQUIRE(run_cli("measure " + fit_dir + "/beta.json " + shape_dir +
                  " --model " + dir + "/model.json") == 0);
  const MeasurementVector direct =
      load_measurement_report(shape_dir + "/report.json");
  const MeasurementVector scenario_based =
      load_measurement_report(measure_dir + "/report.json");
  for (int i = 0; i < kMeasureCount; ++i) {
    const Measure m = static_cast<Measure>(i);
    CHECK(direct[m] == scenario_based[m]);
  }
}

TEST_CASE("cli exit codes follow the error kinds") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("fit") == 2);
  CHECK(run_cli("frobnicate") == 2);

  const std::string out = fresh_dir();
  CHECK(run_cli("fit /nonexistent/scenario.json " + out) == 4);

  const std::string dir = fresh_dir();
  {
    std::ofstream bad(dir + "/broken.json");
    bad << "{ not json";
  }
  CHECK(run_cli("fit " + dir + "/broken.json " + out) == 2);

  SynthOptions opt;
  opt.seed = 41;
  SynthResult synth = synth_scenario(opt);
  write_synth_result(synth, dir);
  Scenario degenerate = synth.scenario;
  for (Vec2& px : degenerate.image_joints.pixels) px = Vec2(512.0, 512.0);
  save_scenario(degenerate, dir + "/degenerate.json");
  CHECK(run_cli("fit " + dir + "/degenerate.json " + out) == 3);

  CHECK(run_cli("measure " + dir + "/scenario.json " + out +
                " --edit inseam=0.8") == 2);
  CHECK(run_cli("measure " + dir + "/scenario.json " + out +
                " --edit waist_width=-1") == 2);

  {
    std::ofstream empty(dir + "/empty_db.jsonl");
  }
  CHECK(run_cli("evolve " + dir + "/scenario.json " + dir +
                "/empty_db.jsonl " + out + " --count 1") == 2);
}
