#include "smch2/config.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "smch2/diagnostics.hpp"
#include "smch2/error.hpp"

namespace smch2 {

using json = nlohmann::json;

namespace {

double smoothed_peakon(double x, double sigma) {
  // e^{-|x|} convolved with a unit Gaussian of standard deviation sigma
  const double s2 = sigma * sigma;
  const double r = sigma * std::sqrt(2.0);
  const double left = std::exp(s2 / 2 - x) * std::erfc((s2 - x) / r);
  const double right = std::exp(s2 / 2 + x) * std::erfc((s2 + x) / r);
  return 0.5 * ((std::isfinite(left) ? left : 0.0) + (std::isfinite(right) ? right : 0.0));
}

std::function<double(double)> profile(const InitialDataSpec& spec) {
  return std::visit(
      [](const auto& d) -> std::function<double(double)> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ZeroData>) {
          return [](double) { return 0.0; };
        } else if constexpr (std::is_same_v<T, GaussianBump>) {
          if (!(d.width > 0)) throw InvalidParams("GaussianBump width must be positive");
          return [d](double x) {
            const double z = (x - d.center) / d.width;
            return d.amplitude * std::exp(-z * z);
          };
        } else if constexpr (std::is_same_v<T, SmoothedPeakon>) {
          if (!(d.smoothing > 0)) throw InvalidParams("SmoothedPeakon smoothing must be positive");
          return [d](double x) { return d.amplitude * smoothed_peakon(x - d.center, d.smoothing); };
        } else if constexpr (std::is_same_v<T, PeakonAntipeakon>) {
          if (!(d.smoothing > 0) || !(d.separation > 0))
            throw InvalidParams("PeakonAntipeakon needs positive smoothing and separation");
          return [d](double x) {
            const double h = d.separation / 2;
            return d.amplitude * (smoothed_peakon(x - d.center - h, d.smoothing) -
                                  smoothed_peakon(x - d.center + h, d.smoothing));
          };
        } else {
          if (!(d.width > 0)) throw InvalidParams("BreakingProfile width must be positive");
          return [d](double x) {
            const double z = x / d.width;
            return d.slope_target * x * std::exp(-z * z);
          };
        }
      },
      spec);
}

const char* kind_name(const InitialDataSpec& spec) {
  static const char* names[] = {"Zero", "GaussianBump", "SmoothedPeakon", "PeakonAntipeakon",
                                "BreakingProfile"};
  return names[spec.index()];
}

const char* noise_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::None: return "None";
    case NoiseKind::LinearB: return "LinearB";
    case NoiseKind::NonlinearTheta: return "NonlinearTheta";
    case NoiseKind::GeneralHS: return "GeneralHS";
  }
  return "?";
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Reads optional keys, collecting one message per bad field.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  template <class T>
  void get(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(path + "." + key + ": wrong type");
    }
  }

  const json& child(const json& obj, const std::string& path, const char* key) {
    static const json empty = json::object();
    if (!obj.is_object() || !obj.contains(key)) return empty;
    if (!obj.at(key).is_object()) {
      errors_.push_back(path + "." + key + ": expected an object");
      return empty;
    }
    return obj.at(key);
  }

  void fail(const std::string& msg) { errors_.push_back(msg); }

 private:
  std::vector<std::string>& errors_;
};

InitialDataSpec read_initial(Reader& r, const json& j, const std::string& path,
                             const InitialDataSpec& fallback) {
  if (!j.is_object() || j.empty()) return fallback;
  std::string kind = kind_name(fallback);
  r.get(j, path, "kind", kind);
  if (kind == "Zero") return ZeroData{};
  if (kind == "GaussianBump") {
    GaussianBump d;
    r.get(j, path, "amplitude", d.amplitude);
    r.get(j, path, "width", d.width);
    r.get(j, path, "center", d.center);
    return d;
  }
  if (kind == "SmoothedPeakon") {
    SmoothedPeakon d;
    r.get(j, path, "amplitude", d.amplitude);
    r.get(j, path, "smoothing", d.smoothing);
    r.get(j, path, "center", d.center);
    return d;
  }
  if (kind == "PeakonAntipeakon") {
    PeakonAntipeakon d;
    r.get(j, path, "amplitude", d.amplitude);
    r.get(j, path, "separation", d.separation);
    r.get(j, path, "smoothing", d.smoothing);
    r.get(j, path, "center", d.center);
    return d;
  }
  if (kind == "BreakingProfile") {
    BreakingProfile d;
    r.get(j, path, "slope_target", d.slope_target);
    r.get(j, path, "c", d.c);
    r.get(j, path, "b_sup", d.b_sup);
    r.get(j, path, "width", d.width);
    return d;
  }
  r.fail(path + ".kind: unknown initial data kind '" + kind + "'");
  return fallback;
}

json write_initial(const InitialDataSpec& spec) {
  json j;
  j["kind"] = kind_name(spec);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianBump>) {
          j["amplitude"] = d.amplitude;
          j["width"] = d.width;
          j["center"] = d.center;
        } else if constexpr (std::is_same_v<T, SmoothedPeakon>) {
          j["amplitude"] = d.amplitude;
          j["smoothing"] = d.smoothing;
          j["center"] = d.center;
        } else if constexpr (std::is_same_v<T, PeakonAntipeakon>) {
          j["amplitude"] = d.amplitude;
          j["separation"] = d.separation;
          j["smoothing"] = d.smoothing;
          j["center"] = d.center;
        } else if constexpr (std::is_same_v<T, BreakingProfile>) {
          j["slope_target"] = d.slope_target;
          j["c"] = d.c;
          j["b_sup"] = d.b_sup;
          j["width"] = d.width;
        }
      },
      spec);
  return j;
}

void validate_noise(const NoiseParams& p, std::vector<std::string>& errors) {
  constexpr double tol = 1e-12;
  switch (p.kind) {
    case NoiseKind::None: break;
    case NoiseKind::LinearB:
      if (p.b_star < 0) errors.push_back("noise.b_star must be non-negative");
      if (p.b_star > p.b_sup)
        errors.push_back("noise.b_star (" + num(p.b_star) + ") exceeds noise.b_sup (" +
                         num(p.b_sup) + ")");
      else if (p.b * p.b < p.b_star - tol || p.b * p.b > p.b_sup + tol)
        errors.push_back("noise.b: b^2 = " + num(p.b * p.b) + " outside [noise.b_star, noise.b_sup]");
      break;
    case NoiseKind::NonlinearTheta:
      if (!(p.theta > 0)) errors.push_back("noise.theta must be positive");
      if (!(p.a_star > 0)) errors.push_back("noise.a_star must be positive");
      if (p.a_star > p.a_sup)
        errors.push_back("noise.a_star (" + num(p.a_star) + ") exceeds noise.a_sup (" +
                         num(p.a_sup) + ")");
      else if (p.a * p.a < p.a_star - tol || p.a * p.a > p.a_sup + tol)
        errors.push_back("noise.a: a^2 = " + num(p.a * p.a) + " outside [noise.a_star, noise.a_sup]");
      break;
    case NoiseKind::GeneralHS:
      if (p.modes < 1) errors.push_back("noise.modes must be at least 1");
      if (!(std::abs(p.kappa) <= 1)) errors.push_back("noise.kappa must lie in [-1, 1]");
      break;
  }
}

void validate_initial(const InitialDataSpec& spec, const GridPtr& grid, const std::string& path,
                      std::vector<std::string>& errors) {
  try {
    make_initial_data(spec, grid);
  } catch (const Error& e) {
    errors.push_back(path + ": " + e.what());
  }
}

void validate(const RunConfig& c, std::vector<std::string>& errors) {
  GridPtr grid;
  try {
    grid = make_grid(c.n, c.L);
  } catch (const InvalidGrid& e) {
    errors.push_back(std::string("grid: ") + e.what());
  }
  validate_noise(c.noise, errors);
  try {
    c.stepper.validate();
  } catch (const Error& e) {
    errors.push_back(std::string("stepper: ") + e.what());
  }
  if (c.n_paths < 1) errors.push_back("ensemble.n_paths must be at least 1");
  if (c.record_paths < 0) errors.push_back("ensemble.record_paths must be non-negative");
  if (c.directory.empty()) errors.push_back("outputs.directory must not be empty");
  const auto& s = c.scenario;
  if (!(s.c > 0 && s.c < 1)) errors.push_back("scenario.c must lie in (0, 1)");
  if (!(s.lambda > 0)) errors.push_back("scenario.lambda must be positive");
  if (!(s.R > 1)) errors.push_back("scenario.R must exceed 1");
  if (!(s.lambda1 > 1) || !(s.lambda2 > 0) || !(s.lambda2 < (s.lambda1 - 1) / s.lambda1))
    errors.push_back("scenario.lambda1, scenario.lambda2 must satisfy lambda1 > 1 and "
                     "0 < lambda2 < (lambda1 - 1)/lambda1");
  if (!(s.alpha > 0)) errors.push_back("scenario.alpha must be positive");
  if (s.particles < 1) errors.push_back("scenario.particles must be at least 1");
  if (!(s.particle_lo < s.particle_hi))
    errors.push_back("scenario.particle_lo must be below scenario.particle_hi");
  if (s.fit_suite < 1) errors.push_back("scenario.fit_suite must be at least 1");
  if (s.bound_paths < 1) errors.push_back("scenario.bound_paths must be at least 1");
  if (!(s.bound_dt > 0)) errors.push_back("scenario.bound_dt must be positive");
  if (!grid) return;

  const std::size_t before = errors.size();
  validate_initial(c.u0, grid, "initial_data.u", errors);
  validate_initial(c.gamma0, grid, "initial_data.gamma", errors);
  if (errors.size() != before) return;
  if (const auto* bp = std::get_if<BreakingProfile>(&c.u0)) {
    if (!(bp->c > 0 && bp->c < 1)) {
      errors.push_back("initial_data.u.c must lie in (0, 1)");
      return;
    }
    if (!(bp->b_sup > 0)) {
      errors.push_back("initial_data.u.b_sup must be positive");
      return;
    }
    const Field u0 = make_initial_data(c.u0, grid);
    const Field g0 = make_initial_data(c.gamma0, grid);
    const double E = energy(u0, g0);
    const double threshold = threshold_break_slope(E, bp->b_sup, bp->c);
    const double slope = derivative(u0).min();
    if (!(slope < threshold))
      errors.push_back("initial_data.u.slope_target: realized slope " + num(slope) +
                       " is not below the break-slope threshold " + num(threshold) +
                       " (E = " + num(E) + ", b_sup = " + num(bp->b_sup) + ", c = " +
                       num(bp->c) + ")");
  }
}

}  // namespace

Field make_initial_data(const InitialDataSpec& spec, const GridPtr& grid) {
  const auto f = profile(spec);
  const double L = grid->half_length();
  const double edge = std::max(std::abs(f(-L)), std::abs(f(L)));
  if (!(edge < 1e-12))
    throw DecayViolation(std::string(kind_name(spec)) + " does not decay at +-L: |f| = " +
                         num(edge));
  return Field::from_function(grid, f);
}

NoiseSpec NoiseParams::to_spec() const {
  switch (kind) {
    case NoiseKind::None: return NoiseSpec::none();
    case NoiseKind::LinearB: return NoiseSpec::linear(b, b_star, b_sup);
    case NoiseKind::NonlinearTheta: return NoiseSpec::nonlinear(a, theta, a_star, a_sup);
    case NoiseKind::GeneralHS: return NoiseSpec::general(GeneralHS::with_defaults(modes), kappa);
  }
  return NoiseSpec::none();
}

StepperConfig RunConfig::default_stepper() {
  StepperConfig s;
  s.t_end = 10.0;
  return s;
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigRejected({std::string("config: not valid JSON: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigRejected({"config: top level must be an object"});

  std::vector<std::string> errors;
  Reader r(errors);
  RunConfig c;

  const json& grid = r.child(root, "config", "grid");
  r.get(grid, "grid", "n", c.n);
  r.get(grid, "grid", "L", c.L);

  const json& init = r.child(root, "config", "initial_data");
  c.u0 = read_initial(r, r.child(init, "initial_data", "u"), "initial_data.u", c.u0);
  c.gamma0 = read_initial(r, r.child(init, "initial_data", "gamma"), "initial_data.gamma", c.gamma0);

  const json& noise = r.child(root, "config", "noise");
  std::string kind = "None";
  r.get(noise, "noise", "kind", kind);
  auto& np = c.noise;
  if (kind == "None") {
    np.kind = NoiseKind::None;
  } else if (kind == "LinearB") {
    np.kind = NoiseKind::LinearB;
    r.get(noise, "noise", "b", np.b);
    np.b_star = np.b_sup = np.b * np.b;
    r.get(noise, "noise", "b_star", np.b_star);
    r.get(noise, "noise", "b_sup", np.b_sup);
  } else if (kind == "NonlinearTheta") {
    np.kind = NoiseKind::NonlinearTheta;
    r.get(noise, "noise", "a", np.a);
    r.get(noise, "noise", "theta", np.theta);
    np.a_star = np.a_sup = np.a * np.a;
    r.get(noise, "noise", "a_star", np.a_star);
    r.get(noise, "noise", "a_sup", np.a_sup);
  } else if (kind == "GeneralHS") {
    np.kind = NoiseKind::GeneralHS;
    r.get(noise, "noise", "modes", np.modes);
    r.get(noise, "noise", "kappa", np.kappa);
  } else {
    errors.push_back("noise.kind: unknown noise kind '" + kind + "'");
  }

  const json& st = r.child(root, "config", "stepper");
  std::string method = to_string(c.stepper.method);
  r.get(st, "stepper", "method", method);
  try {
    c.stepper.method = method_from_string(method);
  } catch (const Error&) {
    errors.push_back("stepper.method: unknown method '" + method + "'");
  }
  r.get(st, "stepper", "dt", c.stepper.dt);
  r.get(st, "stepper", "blowup_w1inf", c.stepper.blowup_w1inf);
  r.get(st, "stepper", "blowup_hs", c.stepper.blowup_hs);
  r.get(st, "stepper", "s_monitor", c.stepper.s_monitor);
  const json& dr = r.child(st, "stepper", "drift");
  r.get(dr, "stepper.drift", "use_cutoff", c.stepper.drift.use_cutoff);
  r.get(dr, "stepper.drift", "R", c.stepper.drift.R);
  r.get(dr, "stepper.drift", "use_mollified", c.stepper.drift.use_mollified);
  r.get(dr, "stepper.drift", "eps", c.stepper.drift.eps);
  r.get(dr, "stepper.drift", "dealias", c.stepper.drift.dealias);

  const json& ens = r.child(root, "config", "ensemble");
  r.get(ens, "ensemble", "n_paths", c.n_paths);
  r.get(ens, "ensemble", "master_seed", c.master_seed);
  r.get(ens, "ensemble", "horizon", c.stepper.t_end);
  r.get(ens, "ensemble", "record_paths", c.record_paths);

  const json& out = r.child(root, "config", "outputs");
  r.get(out, "outputs", "stride", c.stepper.output_stride);
  r.get(out, "outputs", "directory", c.directory);

  const json& sc = r.child(root, "config", "scenario");
  auto& s = c.scenario;
  r.get(sc, "scenario", "c", s.c);
  r.get(sc, "scenario", "lambda", s.lambda);
  r.get(sc, "scenario", "alpha", s.alpha);
  r.get(sc, "scenario", "R", s.R);
  r.get(sc, "scenario", "lambda1", s.lambda1);
  r.get(sc, "scenario", "lambda2", s.lambda2);
  r.get(sc, "scenario", "particles", s.particles);
  r.get(sc, "scenario", "particle_lo", s.particle_lo);
  r.get(sc, "scenario", "particle_hi", s.particle_hi);
  r.get(sc, "scenario", "fit_suite", s.fit_suite);
  r.get(sc, "scenario", "bound_paths", s.bound_paths);
  r.get(sc, "scenario", "bound_dt", s.bound_dt);

  validate(c, errors);
  if (!errors.empty()) throw ConfigRejected(errors);
  return c;
}

std::string serialize(const RunConfig& c) {
  json j;
  j["grid"] = {{"n", c.n}, {"L", c.L}};
  j["initial_data"] = {{"u", write_initial(c.u0)}, {"gamma", write_initial(c.gamma0)}};
  json noise = {{"kind", noise_name(c.noise.kind)}};
  switch (c.noise.kind) {
    case NoiseKind::None: break;
    case NoiseKind::LinearB:
      noise["b"] = c.noise.b;
      noise["b_star"] = c.noise.b_star;
      noise["b_sup"] = c.noise.b_sup;
      break;
    case NoiseKind::NonlinearTheta:
      noise["a"] = c.noise.a;
      noise["theta"] = c.noise.theta;
      noise["a_star"] = c.noise.a_star;
      noise["a_sup"] = c.noise.a_sup;
      break;
    case NoiseKind::GeneralHS:
      noise["modes"] = c.noise.modes;
      noise["kappa"] = c.noise.kappa;
      break;
  }
  j["noise"] = noise;
  const auto& st = c.stepper;
  j["stepper"] = {{"method", to_string(st.method)},
                  {"dt", st.dt},
                  {"blowup_w1inf", st.blowup_w1inf},
                  {"blowup_hs", st.blowup_hs},
                  {"s_monitor", st.s_monitor},
                  {"drift",
                   {{"use_cutoff", st.drift.use_cutoff},
                    {"R", st.drift.R},
                    {"use_mollified", st.drift.use_mollified},
                    {"eps", st.drift.eps},
                    {"dealias", st.drift.dealias}}}};
  j["ensemble"] = {{"n_paths", c.n_paths},
                   {"master_seed", c.master_seed},
                   {"horizon", st.t_end},
                   {"record_paths", c.record_paths}};
  j["outputs"] = {{"stride", st.output_stride}, {"directory", c.directory}};
  const auto& s = c.scenario;
  j["scenario"] = {{"c", s.c},
                   {"lambda", s.lambda},
                   {"alpha", s.alpha},
                   {"R", s.R},
                   {"lambda1", s.lambda1},
                   {"lambda2", s.lambda2},
                   {"particles", s.particles},
                   {"particle_lo", s.particle_lo},
                   {"particle_hi", s.particle_hi},
                   {"fit_suite", s.fit_suite},
                   {"bound_paths", s.bound_paths},
                   {"bound_dt", s.bound_dt}};
  return j.dump(2);
}

double initial_energy(const RunConfig& cfg) {
  const auto grid = make_grid(cfg.n, cfg.L);
  return energy(make_initial_data(cfg.u0, grid), make_initial_data(cfg.gamma0, grid));
}

}  // namespace smch2
