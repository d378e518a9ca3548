#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "smch2/config.hpp"
#include "smch2/error.hpp"
#include "smch2/scenarios.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw smch2::Error("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pathwise simulator and Monte Carlo laboratory for the stochastic MCH2 system"};
  std::string scenario, config_path, out_dir;
  std::optional<int> paths;
  std::optional<std::uint64_t> seed;
  std::string names;
  for (const auto& n : smch2::scenario_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("scenario", scenario, "one of: " + names)->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--paths", paths, "override ensemble.n_paths");
  app.add_option("--seed", seed, "override ensemble.master_seed");
  app.add_option("--out", out_dir, "override outputs.directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    const auto which = smch2::scenario_from_string(scenario);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw smch2::ConfigRejected({std::string("config: not valid JSON: ") + e.what()});
    }
    if (!j.is_object()) throw smch2::ConfigRejected({"config: top level must be an object"});
    if (paths) j["ensemble"]["n_paths"] = *paths;
    if (seed) j["ensemble"]["master_seed"] = *seed;
    if (!out_dir.empty()) j["outputs"]["directory"] = out_dir;
    const auto cfg = smch2::parse_config(j.dump());
    const auto result = smch2::run_scenario(which, cfg);
    std::cout << smch2::to_string(which) << ": " << smch2::to_string(result.verdict) << " ("
              << result.headline << "), output in " << cfg.directory << '\n';
    return result.verdict == smch2::Verdict::Pass ? kExitPass : kExitFail;
  } catch (const smch2::ConfigRejected& e) {
    std::cerr << "config rejected:\n";
    for (const auto& m : e.messages()) std::cerr << "  " << m << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
