#ifndef SMCH2_SCENARIOS_HPP
#define SMCH2_SCENARIOS_HPP

#include <string>
#include <vector>

#include "smch2/config.hpp"
#include "smch2/ensemble.hpp"

namespace smch2 {

enum class Scenario {
  Conserve,
  BlowupSlope,
  BlowupCubic,
  GlobalWeak,
  StrongNoise,
  Lemma25,
  SignPreserve
};

const char* to_string(Scenario s);
/// Throws InvalidParams for unknown names.
Scenario scenario_from_string(const std::string& name);
std::vector<std::string> scenario_names();

inline constexpr int kManifestSchemaVersion = 1;
const char* software_version();

struct ScenarioResult {
  Verdict verdict = Verdict::Fail;
  std::string headline;  // one-line human summary
  std::string manifest;  // manifest JSON text (also written to disk)
};

/// Runs the scenario pipeline and writes manifest.json, summary.csv and
/// path_NNNN.csv files into cfg.directory. Throws ConfigRejected if the config
/// does not fit the scenario.
ScenarioResult run_scenario(Scenario scenario, const RunConfig& cfg);

/// Column order of every per-path time-series file.
inline constexpr const char* kSeriesHeader = "t,Hs_u,Hs_g,w1inf_u,w1inf_g,min_ux,energy,beta";

}  // namespace smch2

#endif
