#include "smch2/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "smch2/diagnostics.hpp"
#include "smch2/error.hpp"

namespace smch2 {

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Lemma25: return "Lemma25";
    case BoundKind::T37: return "T37";
    case BoundKind::T38: return "T38";
    case BoundKind::T39: return "T39";
    case BoundKind::None: return "None";
  }
  return "?";
}

const char* to_string(Verdict v) { return v == Verdict::Pass ? "PASS" : "FAIL"; }

std::pair<double, double> wilson_interval(int k, int n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double p = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double wilson_se(int k, int n) {
  if (n <= 0) return 0.0;
  const double p = static_cast<double>(k) / n;
  return std::sqrt(p * (1 - p) / n + 1.0 / (4.0 * n * n)) / (1.0 + 1.0 / n);
}

int worker_count() {
  if (const char* env = std::getenv("SMCH2_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, int workers, const std::function<void(int)>& f) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

EnsembleSummary summarize(std::vector<PathRecord> records) {
  EnsembleSummary s;
  s.n_paths = static_cast<int>(records.size());
  for (const auto& r : records) {
    if (r.reason == StopReason::NonFinite) ++s.n_nonfinite;
    else if (r.reason == StopReason::Completed) ++s.n_completed;
    else ++s.n_blowup;
  }
  if (s.n_paths > 0) s.p_hat = static_cast<double>(s.n_blowup) / s.n_paths;
  s.se = wilson_se(s.n_blowup, s.n_paths);
  std::tie(s.ci_low, s.ci_high) = wilson_interval(s.n_blowup, s.n_paths);
  s.ci_low = std::min(s.ci_low, s.p_hat);
  s.ci_high = std::max(s.ci_high, s.p_hat);
  s.records = std::move(records);
  return s;
}

EnsembleSummary run_ensemble(const Field& u0, const Field& gamma0, const NoiseSpec& spec,
                             const StepperConfig& cfg, int n_paths, std::uint64_t master_seed,
                             const EnsembleOptions& opts) {
  if (n_paths < 1) throw InvalidParams("n_paths must be at least 1");
  cfg.validate();
  spec.validate();
  std::vector<PathRecord> records(n_paths);
  std::vector<RunResult> kept(std::min(opts.keep, n_paths));
  parallel_for(n_paths, opts.workers > 0 ? opts.workers : worker_count(), [&](int i) {
    const std::uint64_t seed = split_seed(master_seed, static_cast<std::uint64_t>(i));
    PathRecord rec{static_cast<std::uint64_t>(i), seed};
    try {
      RunResult r = run_path(u0, gamma0, spec, cfg, seed);
      if (opts.inspect) opts.inspect(i, r);
      rec.reason = r.stop_reason;
      rec.stop_time = r.stop_time;
      for (const auto& s : r.series) rec.max_w1inf = std::max(rec.max_w1inf, s.w1inf_u + s.w1inf_g);
      if (i < static_cast<int>(kept.size())) kept[i] = std::move(r);
    } catch (const NonFinite&) {
      rec.reason = StopReason::NonFinite;
    }
    records[i] = rec;
  });

  EnsembleSummary s = summarize(std::move(records));
  if (opts.on_path)
    for (int i = 0; i < static_cast<int>(kept.size()); ++i) opts.on_path(i, kept[i]);
  return s;
}

namespace {

McEstimate finish(int k, int n, double bound) {
  McEstimate e;
  e.n = n;
  e.k = k;
  e.p_hat = static_cast<double>(k) / n;
  e.se = wilson_se(k, n);
  std::tie(e.ci_low, e.ci_high) = wilson_interval(k, n);
  e.bound = bound;
  return e;
}

/// Counts paths for which `hit(path)` is true, in parallel, seeds split from `seed`.
int count_paths(int n_paths, std::uint64_t seed, double dt, int steps,
                const std::function<bool(const BrownianPath&)>& hit) {
  std::vector<char> flags(n_paths, 0);
  parallel_for(n_paths, worker_count(), [&](int i) {
    flags[i] = hit(sample_brownian(split_seed(seed, static_cast<std::uint64_t>(i)), dt, steps));
  });
  int k = 0;
  for (char f : flags) k += f;
  return k;
}

int horizon_steps(double T, double dt) {
  if (!(dt > 0.0) || !(T >= dt)) throw InvalidParams("need 0 < dt <= T");
  return static_cast<int>(std::llround(T / dt));
}

}  // namespace

McEstimate lemma25_experiment(const TimeFn& alpha, double lambda, double R, double T, double dt,
                              int n_paths, std::uint64_t seed) {
  if (!(lambda > 0.0) || !(R > 1.0) || n_paths < 1) throw InvalidParams("need lambda > 0, R > 1");
  const int steps = horizon_steps(T, dt);
  const double logR = std::log(R);
  const int k = count_paths(n_paths, seed, dt, steps, [&](const BrownianPath& p) {
    double x = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double a = alpha(i * dt);
      x += a * p.increments[i] - lambda * a * a * dt;
      if (x >= logR) return false;
    }
    return true;
  });
  return finish(k, n_paths, process_bound(lambda, R));
}

bool breaking_event(const BrownianPath& path, const TimeFn& b, double b_sup, double c) {
  if (!(c > 0.0 && c < 1.0)) throw InvalidC("c must lie in (0, 1)");
  const double logc = std::log(c);
  double x = 0.0;
  for (int i = 0; i < path.n_steps(); ++i) {
    const double bi = b(i * path.dt);
    x += bi * path.increments[i] + 0.5 * (b_sup - bi * bi) * path.dt;
    if (x < logc) return false;
  }
  return true;
}

McEstimate breaking_bound_mc(const TimeFn& b, double b_sup, double c, double T, double dt,
                             int n_paths, std::uint64_t seed) {
  if (!(c > 0.0 && c < 1.0)) throw InvalidC("c must lie in (0, 1)");
  if (n_paths < 1) throw InvalidParams("n_paths must be at least 1");
  const int steps = horizon_steps(T, dt);
  const int k = count_paths(n_paths, seed, dt, steps, [&](const BrownianPath& p) {
    return breaking_event(p, b, b_sup, c);
  });
  return finish(k, n_paths, 0.0);
}

Verdict compare_to_bound(double p_hat, double se, double bound) {
  return p_hat + 3.0 * se >= bound ? Verdict::Pass : Verdict::Fail;
}

Verdict compare_blowup_to_bound(const EnsembleSummary& summary, double bound) {
  return compare_to_bound(summary.p_hat, summary.se, bound);
}

}  // namespace smch2
