#ifndef SMCH2_ENSEMBLE_HPP
#define SMCH2_ENSEMBLE_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "smch2/integrators.hpp"

namespace smch2 {

enum class BoundKind { Lemma25, T37, T38, T39, None };
const char* to_string(BoundKind k);

struct PathRecord {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  StopReason reason = StopReason::Completed;
  double stop_time = 0.0;
  double max_w1inf = 0.0;  // physical W^{1,inf} sum over the recorded samples
};

struct EnsembleSummary {
  int n_paths = 0;
  int n_blowup = 0;
  int n_completed = 0;
  int n_nonfinite = 0;
  double p_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound_value = 0.0;
  BoundKind bound_kind = BoundKind::None;
  std::vector<PathRecord> records;
};

/// 95% Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(int k, int n, double z = 1.96);
/// Wilson-centred standard error: sqrt(p(1-p)/n + 1/(4n^2)) / (1 + 1/n).
double wilson_se(int k, int n);

/// Worker count from SMCH2_THREADS, else hardware concurrency (at least 1).
int worker_count();

/// Runs f(i) for i in [0, n) on `workers` threads; exceptions are rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& f);

struct EnsembleOptions {
  int workers = 0;  // 0: worker_count()
  /// Called once per path, in path order, after all paths finished.
  std::function<void(int index, const RunResult&)> on_path;
  /// Keep full RunResults for the first `keep` paths (passed to on_path).
  int keep = 0;
  /// Called on the worker thread for every finished path.
  std::function<void(int index, const RunResult&)> inspect;
};

/// Counts, p_hat (blow-up fraction) and Wilson statistics of finished records.
EnsembleSummary summarize(std::vector<PathRecord> records);

/// Seeds are split_seed(master_seed, index); summary order never depends on
/// scheduling.
EnsembleSummary run_ensemble(const Field& u0, const Field& gamma0, const NoiseSpec& spec,
                             const StepperConfig& cfg, int n_paths, std::uint64_t master_seed,
                             const EnsembleOptions& opts = {});

struct McEstimate {
  int n = 0;
  int k = 0;
  double p_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound = 0.0;
};

/// P{x(t) < R on [0, T]} for x = exp(int alpha dW - lambda int alpha^2 dt);
/// bound = 1 - R^{-2 lambda}.
McEstimate lemma25_experiment(const TimeFn& alpha, double lambda, double R, double T, double dt,
                              int n_paths, std::uint64_t seed);

/// P{exp(int b dW + int (b_sup - b^2)/2 dt) >= c on [0, T]}.
McEstimate breaking_bound_mc(const TimeFn& b, double b_sup, double c, double T, double dt,
                             int n_paths, std::uint64_t seed);

/// The event above evaluated on one given path.
bool breaking_event(const BrownianPath& path, const TimeFn& b, double b_sup, double c);

enum class Verdict { Pass, Fail };
const char* to_string(Verdict v);

/// PASS iff p_hat + 3 se >= bound.
Verdict compare_to_bound(double p_hat, double se, double bound);
Verdict compare_blowup_to_bound(const EnsembleSummary& summary, double bound);

}  // namespace smch2

#endif
