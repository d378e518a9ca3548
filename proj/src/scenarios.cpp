#include "smch2/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "smch2/characteristics.hpp"
#include "smch2/diagnostics.hpp"
#include "smch2/error.hpp"

#ifndef SMCH2_VERSION
#define SMCH2_VERSION "0.0.0"
#endif

namespace smch2 {

using json = nlohmann::json;

namespace {

constexpr const char* kNames[] = {"conserve",    "blowup-slope", "blowup-cubic", "global-weak",
                                  "strong-noise", "lemma25",      "sign-preserve"};

// Independent streams for the auxiliary Monte Carlo and the fitting suite.
constexpr std::uint64_t kBoundStream = 0x626f756e64ull;
constexpr std::uint64_t kFitStream = 0x666974ull;

json to_json(const ThresholdReport& r) {
  json inputs = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  return {{"theorem", to_string(r.theorem)}, {"inputs", inputs},       {"formula", r.formula},
          {"threshold", r.threshold},        {"observed", r.observed}, {"satisfied", r.satisfied}};
}

json to_json(const FittedConstants& f) {
  return {{"C_fit", f.C_fit},           {"Q_fit", f.Q_fit}, {"K_fit", f.K_fit},
          {"C_raw", f.C_raw},           {"suite_size", f.suite_size},
          {"seed", f.seed}};
}

json to_json(const EnsembleSummary& s) {
  return {{"n_paths", s.n_paths},     {"n_blowup", s.n_blowup}, {"n_completed", s.n_completed},
          {"n_nonfinite", s.n_nonfinite}, {"p_hat", s.p_hat},   {"se", s.se},
          {"ci_low", s.ci_low},       {"ci_high", s.ci_high},   {"bound_value", s.bound_value},
          {"bound_kind", to_string(s.bound_kind)}};
}

json records_json(const std::vector<PathRecord>& records) {
  json a = json::array();
  for (const auto& r : records)
    a.push_back({{"index", r.index},
                 {"seed", r.seed},
                 {"reason", to_string(r.reason)},
                 {"stop_time", r.stop_time},
                 {"max_w1inf", r.max_w1inf}});
  return a;
}

PathRecord make_record(int i, std::uint64_t seed, const RunResult& r) {
  PathRecord rec{static_cast<std::uint64_t>(i), seed, r.stop_reason, r.stop_time, 0.0};
  for (const auto& s : r.series) rec.max_w1inf = std::max(rec.max_w1inf, s.w1inf_u + s.w1inf_g);
  return rec;
}

void write_series(const std::filesystem::path& dir, int index, const RunResult& r) {
  char name[32];
  std::snprintf(name, sizeof name, "path_%04d.csv", index);
  std::ofstream out(dir / name);
  if (!out) throw Error("cannot write " + (dir / name).string());
  out << kSeriesHeader << '\n';
  char line[256];
  for (const auto& s : r.series) {
    std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.12g,%.10g\n", s.t,
                  s.Hs_u, s.Hs_g, s.w1inf_u, s.w1inf_g, s.min_ux, s.energy, s.beta);
    out << line;
  }
}

std::string sign_class(const Field& V) {
  int first = 0, last = 0, changes = 0;
  for (double v : V.values()) {
    const int s = std::abs(v) < 1e-10 ? 0 : (v > 0 ? 1 : -1);
    if (s == 0) continue;
    if (first == 0) first = s;
    else if (s != last) ++changes;
    last = s;
  }
  if (first == 0) return "zero";
  if (changes == 0) return first > 0 ? "positive" : "negative";
  if (changes == 1) return first < 0 ? "single-crossing (negative left)" : "single-crossing (positive left)";
  return "mixed";
}

struct Context {
  const RunConfig& cfg;
  GridPtr grid;
  Field u0, g0;
  NoiseSpec noise;
  std::filesystem::path dir;
  json manifest;
  json reports = json::array();
  json metrics = json::object();

  explicit Context(const RunConfig& c)
      : cfg(c),
        grid(make_grid(c.n, c.L)),
        u0(make_initial_data(c.u0, grid)),
        g0(make_initial_data(c.gamma0, grid)),
        noise(c.noise.to_spec()),
        dir(c.directory) {
    std::filesystem::create_directories(dir);
  }

  double E0() const { return energy(u0, g0); }

  /// Ensemble over the configured paths, writing the first record_paths series.
  EnsembleSummary ensemble(const StepperConfig& stepper,
                           const std::function<void(int, const RunResult&)>& inspect = {}) {
    EnsembleOptions opts;
    opts.inspect = [&](int i, const RunResult& r) {
      if (i < cfg.record_paths) write_series(dir, i, r);
      if (inspect) inspect(i, r);
    };
    return run_ensemble(u0, g0, noise, stepper, cfg.n_paths, cfg.master_seed, opts);
  }

  FittedConstants fit() {
    const auto f = fit_constants(grid, cfg.scenario.fit_suite,
                                 split_seed(cfg.master_seed, kFitStream), cfg.stepper.s_monitor);
    manifest["fitted_constants"] = to_json(f);
    return f;
  }
};

void reject_unless(bool ok, const std::string& msg) {
  if (!ok) throw ConfigRejected({msg});
}

const LinearB& require_linear(const Context& c, const char* scenario) {
  reject_unless(c.noise.is_linear(), std::string(scenario) + " requires noise.kind LinearB");
  return std::get<LinearB>(c.noise.model);
}

ScenarioResult finish(Context& c, Scenario sc, Verdict v, const std::string& headline,
                      const EnsembleSummary* summary, double wall) {
  auto& m = c.manifest;
  m["schema_version"] = kManifestSchemaVersion;
  m["scenario"] = to_string(sc);
  m["software_version"] = software_version();
  m["config"] = json::parse(serialize(c.cfg));
  if (!m.contains("fitted_constants")) m["fitted_constants"] = nullptr;
  m["threshold_reports"] = c.reports;
  m["metrics"] = c.metrics;
  m["stop_records"] = summary ? records_json(summary->records) : json::array();
  m["summary"] = summary ? to_json(*summary) : json(nullptr);
  m["verdict"] = to_string(v);
  m["headline"] = headline;
  m["wall_time_s"] = wall;
  const std::string text = m.dump(2);
  {
    std::ofstream out(c.dir / "manifest.json");
    if (!out) throw Error("cannot write manifest");
    out << text << '\n';
  }
  {
    std::ofstream out(c.dir / "summary.csv");
    if (!out) throw Error("cannot write summary");
    out << "scenario,n_paths,n_blowup,n_completed,n_nonfinite,p_hat,se,ci_low,ci_high,bound,"
           "bound_kind,verdict\n";
    char line[512];
    if (summary) {
      const auto& s = *summary;
      std::snprintf(line, sizeof line, "%s,%d,%d,%d,%d,%.8g,%.8g,%.8g,%.8g,%.8g,%s,%s\n",
                    to_string(sc), s.n_paths, s.n_blowup, s.n_completed, s.n_nonfinite, s.p_hat,
                    s.se, s.ci_low, s.ci_high, s.bound_value, to_string(s.bound_kind),
                    to_string(v));
    } else {
      std::snprintf(line, sizeof line, "%s,,,,,,,,,,,%s\n", to_string(sc), to_string(v));
    }
    out << line;
  }
  return {v, headline, text};
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------- pipelines

std::pair<Verdict, std::string> conserve(Context& c, EnsembleSummary& summary) {
  reject_unless(c.cfg.stepper.method == Method::TransformedRK4,
                "conserve requires stepper.method TransformedRK4");
  reject_unless(c.noise.is_linear() || c.cfg.noise.kind == NoiseKind::None,
                "conserve requires noise.kind None or LinearB");
  std::vector<double> drift(c.cfg.n_paths, 0.0);
  summary = c.ensemble(c.cfg.stepper, [&](int i, const RunResult& r) {
    const double e0 = r.series.front().energy;
    double worst = 0;
    for (const auto& s : r.series) worst = std::max(worst, std::abs(s.energy - e0) / e0);
    drift[i] = worst;
  });
  double worst = 0;
  for (double d : drift) worst = std::max(worst, d);
  c.metrics["initial_energy"] = c.E0();
  c.metrics["max_relative_energy_drift"] = worst;
  const bool ok = worst < 1e-6 && summary.n_blowup == 0 && summary.n_nonfinite == 0;
  return {ok ? Verdict::Pass : Verdict::Fail, fmt("max relative energy drift %.3e", worst)};
}

std::pair<Verdict, std::string> blowup(Context& c, EnsembleSummary& summary, bool cubic) {
  const auto& lin = require_linear(c, cubic ? "blowup-cubic" : "blowup-slope");
  const double E = c.E0();
  double c_level = c.cfg.scenario.c;
  double b_sup_threshold = lin.b_sup;
  ThresholdReport report;
  if (cubic) {
    reject_unless(lin.b_sup > 0, "blowup-cubic requires noise.b_sup > 0");
    report = report_break_cubic(E, lin.b_sup, c_level, cubic_integral(c.u0));
  } else {
    const auto* bp = std::get_if<BreakingProfile>(&c.cfg.u0);
    reject_unless(bp != nullptr, "blowup-slope requires initial_data.u.kind BreakingProfile");
    reject_unless(lin.b_sup <= bp->b_sup,
                  "blowup-slope requires noise.b_sup <= initial_data.u.b_sup");
    c_level = bp->c;
    b_sup_threshold = bp->b_sup;
    report = report_break_slope(E, b_sup_threshold, c_level, derivative(c.u0).min());
  }
  c.reports.push_back(to_json(report));
  reject_unless(report.satisfied, "initial data does not meet the breaking threshold " +
                                      fmt("%.6g (observed %.6g)", report.threshold, report.observed));

  const auto& s = c.cfg.scenario;
  const auto bound = breaking_bound_mc(lin.b, lin.b_sup, c_level, c.cfg.stepper.t_end, s.bound_dt,
                                       s.bound_paths, split_seed(c.cfg.master_seed, kBoundStream));
  summary = c.ensemble(c.cfg.stepper);
  summary.bound_kind = cubic ? BoundKind::T39 : BoundKind::T38;
  summary.bound_value = bound.p_hat;
  c.metrics["bound_estimate"] = {{"n", bound.n}, {"k", bound.k}, {"p_hat", bound.p_hat},
                                 {"se", bound.se}, {"dt", s.bound_dt}};
  c.metrics["initial_energy"] = E;
  c.metrics["blowup_w1inf_threshold"] = c.cfg.stepper.blowup_w1inf;
  const Verdict v = compare_blowup_to_bound(summary, bound.p_hat);
  return {v, fmt("blow-up fraction %.4f + 3 SE %.4f vs bound %.4f", summary.p_hat, 3 * summary.se,
                 bound.p_hat)};
}

std::pair<Verdict, std::string> global_weak(Context& c, EnsembleSummary& summary) {
  const auto& lin = require_linear(c, "global-weak");
  reject_unless(lin.b_star > 0, "global-weak requires noise.b_star > 0");
  const auto& s = c.cfg.scenario;
  const auto f = c.fit();
  const double sm = c.cfg.stepper.s_monitor;
  const double observed = std::pow(sobolev_norm(c.u0, sm), 2) + std::pow(sobolev_norm(c.g0, sm), 2);
  const auto report = report_global_weak(lin.b_star, f.C_fit, f.Q_fit, s.lambda1, s.R, observed);
  c.reports.push_back(to_json(report));
  reject_unless(report.satisfied, "initial H^s size " + fmt("%.6g", observed) +
                                      " is not below the global-existence threshold " +
                                      fmt("%.6g", report.threshold));
  const double level = lin.b_star / (f.C_fit * f.C_fit * f.Q_fit * f.Q_fit * s.lambda1 * s.lambda1);
  StepperConfig stepper = c.cfg.stepper;
  stepper.output_stride = 1;  // the event is checked at every step
  std::vector<char> stayed(c.cfg.n_paths, 0);
  summary = c.ensemble(stepper, [&](int i, const RunResult& r) {
    bool ok = !r.blew_up();
    for (const auto& x : r.series) ok = ok && x.Hs_u * x.Hs_u + x.Hs_g * x.Hs_g < level;
    stayed[i] = ok;
  });
  int k = 0;
  for (char x : stayed) k += x;
  const double bound = process_bound(s.lambda2, s.R);
  summary.bound_kind = BoundKind::T37;
  summary.bound_value = bound;
  const double p = static_cast<double>(k) / c.cfg.n_paths;
  const double se = wilson_se(k, c.cfg.n_paths);
  c.metrics["event_level"] = level;
  c.metrics["paths_staying_below"] = k;
  c.metrics["p_global"] = p;
  c.metrics["se_global"] = se;
  const Verdict v = compare_to_bound(p, se, bound);
  return {v, fmt("fraction staying below %.4g: %.4f + 3 SE %.4f vs bound %.4f", level, p, 3 * se,
                 bound)};
}

std::pair<Verdict, std::string> strong_noise(Context& c, EnsembleSummary& summary) {
  reject_unless(c.noise.is_nonlinear(), "strong-noise requires noise.kind NonlinearTheta");
  const auto& p = c.cfg.noise;
  const auto f = c.fit();
  const auto report = report_strong_noise(p.a_star, p.a_sup, p.theta, f.K_fit);
  c.reports.push_back(to_json(report));
  reject_unless(report.satisfied, "noise parameters are outside the strong-noise regime");
  summary = c.ensemble(c.cfg.stepper);
  summary.bound_kind = BoundKind::None;
  const bool ok = summary.n_blowup == 0 && summary.n_nonfinite == 0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("%g blow-ups in %g paths", summary.n_blowup, summary.n_paths)};
}

std::pair<Verdict, std::string> lemma25(Context& c) {
  const auto& s = c.cfg.scenario;
  const auto e = lemma25_experiment(constant_fn(s.alpha), s.lambda, s.R, c.cfg.stepper.t_end,
                                    c.cfg.stepper.dt, c.cfg.n_paths, c.cfg.master_seed);
  c.metrics["k"] = e.k;
  c.metrics["n"] = e.n;
  c.metrics["p_hat"] = e.p_hat;
  c.metrics["se"] = e.se;
  c.metrics["ci_low"] = e.ci_low;
  c.metrics["ci_high"] = e.ci_high;
  c.metrics["bound"] = e.bound;
  const Verdict v = compare_to_bound(e.p_hat, e.se, e.bound);
  return {v, fmt("p_hat %.4f + 3 SE %.4f vs bound %.4f", e.p_hat, 3 * e.se, e.bound)};
}

std::pair<Verdict, std::string> sign_preserve(Context& c, EnsembleSummary& summary) {
  const auto& s = c.cfg.scenario;
  const Field V0 = momentum(c.u0);
  c.metrics["sign_class"] = sign_class(V0);
  const ParticleSet start = make_particles(s.particle_lo, s.particle_hi, s.particles);
  const auto initial = sign_signature(V0, start);
  const int n = c.cfg.n_paths;
  std::vector<PathRecord> records(n);
  std::vector<int> flips(n, 0), checks(n, 0);
  std::vector<double> collapse(n, -1.0);
  parallel_for(n, worker_count(), [&](int i) {
    const std::uint64_t seed = split_seed(c.cfg.master_seed, static_cast<std::uint64_t>(i));
    PathHooks hooks;
    hooks.particles = start;
    hooks.observer = [&](const State& st, double, const ParticleSet* ps) {
      if (!ps) return;
      ++checks[i];
      if (sign_signature(momentum(st.first), *ps) != initial) ++flips[i];
    };
    try {
      RunResult r = run_path(c.u0, c.g0, c.noise, c.cfg.stepper, seed, &hooks);
      if (i < c.cfg.record_paths) write_series(c.dir, i, r);
      records[i] = make_record(i, seed, r);
    } catch (const NonFinite&) {
      records[i] = PathRecord{static_cast<std::uint64_t>(i), seed, StopReason::NonFinite};
    }
    if (hooks.jacobian_collapse_time) collapse[i] = *hooks.jacobian_collapse_time;
  });
  summary = summarize(std::move(records));
  int total_flips = 0, total_checks = 0, collapsed = 0;
  json per_path = json::array();
  for (int i = 0; i < n; ++i) {
    total_flips += flips[i];
    total_checks += checks[i];
    collapsed += collapse[i] >= 0;
    per_path.push_back({{"index", i}, {"checks", checks[i]}, {"signature_changes", flips[i]},
                        {"jacobian_collapse_time", collapse[i] >= 0 ? json(collapse[i]) : json()}});
  }
  c.metrics["particles"] = s.particles;
  c.metrics["signature_checks"] = total_checks;
  c.metrics["signature_changes"] = total_flips;
  c.metrics["per_path"] = per_path;
  const bool ok = total_flips == 0 && collapsed == 0 && total_checks > 0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("%g signature changes over %g checks", total_flips, total_checks)};
}

}  // namespace

const char* to_string(Scenario s) { return kNames[static_cast<int>(s)]; }

Scenario scenario_from_string(const std::string& name) {
  for (int i = 0; i < 7; ++i)
    if (name == kNames[i]) return static_cast<Scenario>(i);
  throw InvalidParams("unknown scenario '" + name + "'");
}

std::vector<std::string> scenario_names() { return {std::begin(kNames), std::end(kNames)}; }

const char* software_version() { return SMCH2_VERSION; }

ScenarioResult run_scenario(Scenario sc, const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Context c(cfg);
  EnsembleSummary summary;
  std::pair<Verdict, std::string> out;
  bool has_summary = true;
  switch (sc) {
    case Scenario::Conserve: out = conserve(c, summary); break;
    case Scenario::BlowupSlope: out = blowup(c, summary, false); break;
    case Scenario::BlowupCubic: out = blowup(c, summary, true); break;
    case Scenario::GlobalWeak: out = global_weak(c, summary); break;
    case Scenario::StrongNoise: out = strong_noise(c, summary); break;
    case Scenario::Lemma25:
      out = lemma25(c);
      has_summary = false;
      break;
    case Scenario::SignPreserve: out = sign_preserve(c, summary); break;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return finish(c, sc, out.first, out.second, has_summary ? &summary : nullptr, wall);
}

}  // namespace smch2
