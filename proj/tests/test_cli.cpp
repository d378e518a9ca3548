#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef SMCH2_CLI_PATH
#error "SMCH2_CLI_PATH must name the smch2 executable"
#endif

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("smch2_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SMCH2_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_SUITE("experiment_cli") {

TEST_CASE("exit codes") {
  const auto out = (scratch() / "run").string();
  const auto conserve = write_config(
      "conserve.json", R"({"ensemble": {"n_paths": 2, "horizon": 0.5}, "outputs": {"stride": 50}})");
  CHECK(run("conserve --config " + conserve + " --out " + out) == 0);

  // a threshold below the initial W^{1,inf} size makes every path "blow up"
  const auto strong = write_config(
      "strong.json", R"({"grid": {"n": 64, "L": 10}, "noise": {"kind": "NonlinearTheta", "a": 1, "theta": 1},
                         "stepper": {"blowup_w1inf": 0.5}, "ensemble": {"n_paths": 2, "horizon": 0.1},
                         "scenario": {"fit_suite": 2}})");
  CHECK(run("strong-noise --config " + strong + " --out " + out) == 2);

  CHECK(run("conserve --config " + (scratch() / "missing.json").string()) == 1);
  const auto bad = write_config("bad.json", R"({"noise": {"kind": "NonlinearTheta", "a_star": 3}})");
  CHECK(run("conserve --config " + bad) == 1);
  CHECK(run("no-such-scenario --config " + conserve) == 1);
  CHECK(run("conserve") == 1);
  const auto mismatch = write_config("mismatch.json", R"({"ensemble": {"n_paths": 1, "horizon": 0.1}})");
  CHECK(run("blowup-slope --config " + mismatch + " --out " + out) == 1);
}

TEST_CASE("outputs and overrides") {
  const auto out = scratch() / "outputs";
  const auto cfg = write_config(
      "lemma.json", R"({"ensemble": {"n_paths": 200, "horizon": 1}, "stepper": {"dt": 0.01}})");
  REQUIRE(run("lemma25 --config " + cfg + " --paths 300 --seed 9 --out " + out.string()) == 0);
  std::ifstream in(out / "manifest.json");
  const auto m = nlohmann::json::parse(in);
  CHECK(m["schema_version"] == 1);
  CHECK(m["config"]["ensemble"]["n_paths"] == 300);
  CHECK(m["config"]["ensemble"]["master_seed"] == 9);
  CHECK(m["metrics"]["n"] == 300);
  CHECK(m["verdict"] == "PASS");
  CHECK(fs::exists(out / "summary.csv"));

  const auto run_dir = scratch() / "series";
  const auto conserve = write_config(
      "series.json", R"({"ensemble": {"n_paths": 3, "horizon": 0.2, "record_paths": 2},
                        "noise": {"kind": "LinearB", "b": 0.5}})");
  REQUIRE(run("conserve --config " + conserve + " --out " + run_dir.string()) == 0);
  CHECK(fs::exists(run_dir / "path_0000.csv"));
  CHECK(fs::exists(run_dir / "path_0001.csv"));
  CHECK_FALSE(fs::exists(run_dir / "path_0002.csv"));
  std::ifstream csv(run_dir / "path_0000.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,Hs_u,Hs_g,w1inf_u,w1inf_g,min_ux,energy,beta");
  std::ifstream man(run_dir / "manifest.json");
  const auto mj = nlohmann::json::parse(man);
  CHECK(mj["stop_records"].size() == 3);
  CHECK(mj["metrics"]["max_relative_energy_drift"].get<double>() < 1e-6);

  // the manifest alone reproduces the run
  const auto again = scratch() / "again";
  const auto echo = write_config("echo.json", mj["config"].dump());
  REQUIRE(run("conserve --config " + echo + " --out " + again.string()) == 0);
  std::ifstream man2(again / "manifest.json");
  const auto mj2 = nlohmann::json::parse(man2);
  CHECK(mj2["stop_records"] == mj["stop_records"]);
  CHECK(mj2["metrics"] == mj["metrics"]);
}

TEST_CASE("sign-preserve with positive momentum passes") {
  const auto cfg = write_config(
      "sign.json", R"({"grid": {"n": 2048, "L": 32},
                      "initial_data": {"u": {"kind": "SmoothedPeakon", "smoothing": 0.5}},
                      "noise": {"kind": "LinearB", "b": 0.5},
                      "ensemble": {"n_paths": 1, "horizon": 0.5}})");
  CHECK(run("sign-preserve --config " + cfg + " --out " + (scratch() / "sign").string()) == 0);
}

}
