#include "smch2/integrators.hpp"

#include <algorithm>
#include <cmath>

#include "smch2/error.hpp"

namespace smch2 {

const char* to_string(Method m) {
  switch (m) {
    case Method::EulerMaruyama: return "EulerMaruyama";
    case Method::MilsteinLinear: return "MilsteinLinear";
    case Method::TransformedRK4: return "TransformedRK4";
  }
  return "?";
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Completed: return "Completed";
    case StopReason::BlowupW1inf: return "BlowupW1inf";
    case StopReason::BlowupHs: return "BlowupHs";
    case StopReason::NonFinite: return "NonFinite";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "EulerMaruyama" || s == "em") return Method::EulerMaruyama;
  if (s == "MilsteinLinear" || s == "milstein") return Method::MilsteinLinear;
  if (s == "TransformedRK4" || s == "rk4") return Method::TransformedRK4;
  throw InvalidParams("unknown method '" + s + "'");
}

int StepperConfig::n_steps() const { return static_cast<int>(std::llround(t_end / dt)); }

void StepperConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidParams("dt must be positive");
  if (!(t_end >= dt)) throw InvalidParams("t_end must be at least dt");
  if (std::abs(n_steps() * dt - t_end) > 1e-9 * t_end)
    throw InvalidParams("t_end must be an integer multiple of dt");
  if (!(blowup_w1inf > 0.0) || !(blowup_hs > 0.0)) throw InvalidParams("thresholds must be positive");
  if (output_stride < 1) throw InvalidParams("output stride must be at least 1");
  drift.validate();
}

std::vector<double> RunResult::times() const {
  std::vector<double> t;
  t.reserve(series.size());
  for (const auto& s : series) t.push_back(s.t);
  return t;
}

State RunResult::final_physical() const {
  return final_state.frame == Frame::Physical ? final_state
                                              : reconstruct_physical(final_state, final_beta);
}

NoiseDrivers make_drivers(const NoiseSpec& spec, double dt, int n_steps, std::uint64_t seed) {
  NoiseDrivers d;
  const int K = spec.drivers();
  if (!spec.is_general()) {
    d.u.push_back(sample_brownian(split_seed(seed, 0), dt, n_steps));
    d.gamma = d.u;
    return d;
  }
  for (int k = 0; k < K; ++k) {
    auto p = sample_brownian(split_seed(seed, 2 * k), dt, n_steps);
    auto [w1, w2] = correlated_pair(p, spec.kappa, split_seed(seed, 2 * k + 1));
    d.u.push_back(std::move(w1));
    d.gamma.push_back(std::move(w2));
  }
  return d;
}

NoiseDrivers scalar_drivers(const BrownianPath& path) { return NoiseDrivers{{path}, {path}}; }

State reconstruct_physical(const State& v_state, double beta_now) {
  if (v_state.frame != Frame::Transformed) throw FrameMismatch("state is already physical");
  return State{v_state.first * beta_now, v_state.second * beta_now, v_state.t, Frame::Physical};
}

State to_transformed(const State& u_state, double beta_now) {
  if (u_state.frame != Frame::Physical) throw FrameMismatch("state is already transformed");
  if (!(beta_now > 0.0)) throw InvalidParams("beta must be positive");
  return State{u_state.first * (1.0 / beta_now), u_state.second * (1.0 / beta_now), u_state.t,
               Frame::Transformed};
}

namespace {

using Hat = std::vector<Complex>;

void axpy_hat(Hat& out, const Hat& x, double s, const Hat& y) {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = x[j] + s * y[j];
}

double hat_norm2(const SpectralGrid& grid, const Hat& h, const std::vector<double>& weight) {
  double sum = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) sum += weight[j] * std::norm(h[j]);
  return grid.period() * sum;
}

std::vector<double> sobolev_weights(const SpectralGrid& grid, double s) {
  auto k = grid.wavenumbers();
  std::vector<double> w(k.size());
  for (std::size_t j = 0; j < k.size(); ++j)
    w[j] = grid.mode_weight(static_cast<int>(j)) * std::pow(1.0 + k[j] * k[j], s);
  return w;
}

/// Scalar noise coefficient for the scalar families, 0 for GeneralHS.
double scalar_coefficient(const NoiseSpec& spec, double t, double w1inf_phys) {
  if (spec.is_general()) return 0.0;
  return noise_coefficient(spec, t, w1inf_phys).u[0];
}

State state_from_hats(const GridPtr& grid, const Hat& u, const Hat& g, double t, Frame frame) {
  return State{to_field(Spectrum{grid, u}), to_field(Spectrum{grid, g}), t, frame};
}

struct Engine {
  GridPtr grid;
  DriftWorkspace ws;
  Hat k1u, k1g, k2u, k2g, k3u, k3g, k4u, k4g, su, sg;

  Engine(GridPtr g, const DriftOptions& opts) : grid(g), ws(g, opts) {
    const std::size_t m = g->spectrum_size();
    for (auto* v : {&k1u, &k1g, &k2u, &k2g, &k3u, &k3g, &k4u, &k4g, &su, &sg}) v->assign(m, 0.0);
  }

  void eval(const Hat& u, const Hat& g, Hat& du, Hat& dg) { ws.evaluate(u, g, du, dg); }

  /// RK4 given stage betas; k1 must already hold D(u, g).
  void rk4_from_k1(Hat& u, Hat& g, double dt, const double beta[3]) {
    const std::size_t m = u.size();
    axpy_hat(su, u, 0.5 * dt * beta[0], k1u);
    axpy_hat(sg, g, 0.5 * dt * beta[0], k1g);
    eval(su, sg, k2u, k2g);
    axpy_hat(su, u, 0.5 * dt * beta[1], k2u);
    axpy_hat(sg, g, 0.5 * dt * beta[1], k2g);
    eval(su, sg, k3u, k3g);
    axpy_hat(su, u, dt * beta[1], k3u);
    axpy_hat(sg, g, dt * beta[1], k3g);
    eval(su, sg, k4u, k4g);
    const double c = dt / 6.0;
    for (std::size_t j = 0; j < m; ++j) {
      u[j] += c * (beta[0] * k1u[j] + 2.0 * beta[1] * (k2u[j] + k3u[j]) + beta[2] * k4u[j]);
      g[j] += c * (beta[0] * k1g[j] + 2.0 * beta[1] * (k2g[j] + k3g[j]) + beta[2] * k4g[j]);
    }
  }
};

// RK4 with particles: stage betas b0 (left), b1 (mid), b2 (right).
void rk4_with_particles(Engine& e, Hat& u, Hat& g, ParticleSet& p, double dt, const double beta[3]) {
  const std::size_t m = p.size();
  std::vector<double> kq[4], kx[4], q(m), qx(m);
  for (int s = 0; s < 4; ++s) {
    kq[s].resize(m);
    kx[s].resize(m);
  }
  const double stage_beta[4] = {beta[0], beta[1], beta[1], beta[2]};
  const double frac[4] = {0.0, 0.5, 0.5, 1.0};
  Hat* ku[4] = {&e.k1u, &e.k2u, &e.k3u, &e.k4u};
  Hat* kg[4] = {&e.k1g, &e.k2g, &e.k3g, &e.k4g};
  for (int s = 0; s < 4; ++s) {
    const Hat* vu = &u;
    if (s > 0) {
      axpy_hat(e.su, u, frac[s] * dt * stage_beta[s - 1], *ku[s - 1]);
      axpy_hat(e.sg, g, frac[s] * dt * stage_beta[s - 1], *kg[s - 1]);
      vu = &e.su;
      e.eval(e.su, e.sg, *ku[s], *kg[s]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = p.q[i] + (s ? frac[s] * dt * kq[s - 1][i] : 0.0);
      qx[i] = p.qx[i] + (s ? frac[s] * dt * kx[s - 1][i] : 0.0);
    }
    particle_rhs(Spectrum{e.grid, *vu}, stage_beta[s], q, qx, kq[s], kx[s]);
  }
  const double c = dt / 6.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    u[j] += c * (beta[0] * e.k1u[j] + 2.0 * beta[1] * (e.k2u[j] + e.k3u[j]) + beta[2] * e.k4u[j]);
    g[j] += c * (beta[0] * e.k1g[j] + 2.0 * beta[1] * (e.k2g[j] + e.k3g[j]) + beta[2] * e.k4g[j]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    p.q[i] += c * (kq[0][i] + 2 * kq[1][i] + 2 * kq[2][i] + kq[3][i]);
    p.qx[i] += c * (kx[0][i] + 2 * kx[1][i] + 2 * kx[2][i] + kx[3][i]);
  }
  p.t += dt;
}

bool jacobian_ok(const ParticleSet& p) {
  return std::all_of(p.qx.begin(), p.qx.end(), [](double v) { return v > 0.0; });
}

// `scale` maps the integrated state to the physical one; the energy column is
// always that of the transformed variables (u, gamma) / beta.
Sample make_sample(const SpectralGrid& grid, const GridPtr& gp, const Hat& u, const Hat& g,
                   double t, double beta, bool transformed, const std::vector<double>& hs_w,
                   const std::vector<double>& h1_w) {
  Sample s;
  s.t = t;
  s.beta = beta;
  const double scale = transformed ? beta : 1.0;
  s.Hs_u = scale * std::sqrt(hat_norm2(grid, u, hs_w));
  s.Hs_g = scale * std::sqrt(hat_norm2(grid, g, hs_w));
  Spectrum su{gp, u}, sg{gp, g};
  const Field fu = to_field(su), fg = to_field(sg);
  const Field ux = derivative(fu), gx = derivative(fg);
  s.w1inf_u = scale * std::max(fu.max_abs(), ux.max_abs());
  s.w1inf_g = scale * std::max(fg.max_abs(), gx.max_abs());
  s.min_ux = scale * ux.min();
  const double inv = transformed ? 1.0 : 1.0 / (beta * beta);
  s.energy = inv * (hat_norm2(grid, u, h1_w) + hat_norm2(grid, g, h1_w));
  return s;
}

}  // namespace

// ---------------------------------------------------------------- single steps

State step_direct(const State& state, const NoiseSpec& spec, std::span<const double> dw_u,
                  std::span<const double> dw_g, double dt, const DriftOptions& opts,
                  Method method, bool with_drift) {
  if (state.frame != Frame::Physical) throw FrameMismatch("direct step needs a physical state");
  if (method == Method::TransformedRK4) throw InvalidParams("step_direct: use step_transformed");
  if (method == Method::MilsteinLinear && !spec.is_linear())
    throw InvalidParams("Milstein correction is only available for LinearB noise");
  require_same_grid(state.first, state.second);
  const auto coeff = noise_coefficient(spec, state.t, state);
  if (dw_u.size() != coeff.u.size() || dw_g.size() != coeff.gamma.size())
    throw InvalidParams("increment count does not match the noise drivers");

  Field u = state.first, g = state.second;
  if (with_drift) {
    auto [du, dg] = drift(state, opts);
    u = axpy(u, dt, du);
    g = axpy(g, dt, dg);
  }
  double mu = 0.0, mg = 0.0;
  for (std::size_t k = 0; k < coeff.u.size(); ++k) {
    mu += coeff.u[k] * dw_u[k];
    mg += coeff.gamma[k] * dw_g[k];
  }
  if (method == Method::MilsteinLinear) {
    const double c = coeff.u[0];
    mu += 0.5 * c * c * (dw_u[0] * dw_u[0] - dt);
    mg += 0.5 * c * c * (dw_g[0] * dw_g[0] - dt);
  }
  u = axpy(u, mu, state.first);
  g = axpy(g, mg, state.second);
  u.require_finite("u after step");
  g.require_finite("gamma after step");
  return State{std::move(u), std::move(g), state.t + dt, Frame::Physical};
}

State step_direct(const State& state, const NoiseSpec& spec, double dw, double dt,
                  const DriftOptions& opts, Method method, bool with_drift) {
  const double w[1] = {dw};
  return step_direct(state, spec, w, w, dt, opts, method, with_drift);
}

State step_transformed(const State& v_state, const std::function<double(double)>& beta, double dt,
                       const DriftOptions& opts) {
  if (v_state.frame != Frame::Transformed) throw FrameMismatch("transformed step needs (v1, v2)");
  require_same_grid(v_state.first, v_state.second);
  const GridPtr& grid = v_state.first.grid();
  Engine e(grid, opts);
  Hat u = to_spectrum(v_state.first).coeffs;
  Hat g = to_spectrum(v_state.second).coeffs;
  const double b[3] = {beta(v_state.t), beta(v_state.t + 0.5 * dt), beta(v_state.t + dt)};
  e.eval(u, g, e.k1u, e.k1g);
  e.rk4_from_k1(u, g, dt, b);
  State out = state_from_hats(grid, u, g, v_state.t + dt, Frame::Transformed);
  out.first.require_finite("v1 after step");
  out.second.require_finite("v2 after step");
  return out;
}

State step_transformed(const State& v_state, double beta_now, double dt, const DriftOptions& opts) {
  return step_transformed(v_state, [beta_now](double) { return beta_now; }, dt, opts);
}

// ---------------------------------------------------------------- paths

RunResult run_path(const Field& u0, const Field& gamma0, const NoiseSpec& spec,
                   const StepperConfig& cfg, std::uint64_t seed, PathHooks* hooks) {
  cfg.validate();
  return run_path(u0, gamma0, spec, cfg, make_drivers(spec, cfg.dt, cfg.n_steps(), seed), seed,
                  hooks);
}

RunResult run_path(const Field& u0, const Field& gamma0, const NoiseSpec& spec,
                   const StepperConfig& cfg, const NoiseDrivers& drivers, std::uint64_t seed,
                   PathHooks* hooks) {
  cfg.validate();
  spec.validate();
  require_same_grid(u0, gamma0);
  u0.require_finite("u0");
  gamma0.require_finite("gamma0");
  const bool transformed = cfg.method == Method::TransformedRK4;
  if (transformed && spec.is_general())
    throw InvalidParams("TransformedRK4 needs scalar noise (LinearB or NonlinearTheta)");
  if (cfg.method == Method::MilsteinLinear && !spec.is_linear())
    throw InvalidParams("Milstein correction is only available for LinearB noise");
  const int n_steps = cfg.n_steps();
  const int K = spec.drivers();
  if (static_cast<int>(drivers.u.size()) != K || static_cast<int>(drivers.gamma.size()) != K)
    throw InvalidParams("driver count does not match the noise model");
  for (const auto* set : {&drivers.u, &drivers.gamma})
    for (const auto& p : *set)
      if (p.n_steps() < n_steps || std::abs(p.dt - cfg.dt) > 1e-12 * cfg.dt)
        throw InvalidParams("Brownian drivers do not cover the run at this dt");

  const GridPtr grid = u0.grid();
  Engine e(grid, cfg.drift);
  Hat u = to_spectrum(u0).coeffs;
  Hat g = to_spectrum(gamma0).coeffs;
  const auto hs_w = sobolev_weights(*grid, cfg.s_monitor);
  const auto h1_w = sobolev_weights(*grid, 1.0);
  const Frame frame = transformed ? Frame::Transformed : Frame::Physical;

  RunResult res;
  res.seed = seed;
  double beta = 1.0;
  const int stride = cfg.output_stride;
  const int obs_stride = hooks && hooks->observer_stride > 0 ? hooks->observer_stride : stride;
  ParticleSet* particles = hooks && hooks->particles ? &*hooks->particles : nullptr;

  auto observe = [&](double t) {
    if (hooks && hooks->observer)
      hooks->observer(state_from_hats(grid, u, g, t, frame), beta, particles);
  };
  auto stop = [&](StopReason r, double t) {
    res.stop_reason = r;
    res.stop_time = t;
    if (r != StopReason::NonFinite) {
      if (res.series.empty() || res.series.back().t != t)
        res.series.push_back(make_sample(*grid, grid, u, g, t, beta, transformed, hs_w, h1_w));
      observe(t);
    }
  };

  Hat du(u.size()), dg(u.size());
  for (int n = 0;; ++n) {
    const double t = n * cfg.dt;
    // drift at the left endpoint; gives the monitored W^{1,inf} sum for free
    e.eval(u, g, e.k1u, e.k1g);
    // monitored norms are those of the physical solution
    const double scale = transformed ? beta : 1.0;
    const double S = scale * e.ws.last_w1inf_sum();
    const double hs =
        scale * (std::sqrt(hat_norm2(*grid, u, hs_w)) + std::sqrt(hat_norm2(*grid, g, hs_w)));
    if (!std::isfinite(hs) || !std::isfinite(S) || !std::isfinite(beta)) {
      res.stop_reason = StopReason::NonFinite;
      res.stop_time = t;
      break;
    }
    if (n % stride == 0) res.series.push_back(make_sample(*grid, grid, u, g, t, beta, transformed, hs_w, h1_w));
    if (n % obs_stride == 0 && n < n_steps) observe(t);
    if (S >= cfg.blowup_w1inf) {
      stop(StopReason::BlowupW1inf, t);
      break;
    }
    if (hs >= cfg.blowup_hs) {
      stop(StopReason::BlowupHs, t);
      break;
    }
    if (n == n_steps) {
      stop(StopReason::Completed, t);
      break;
    }

    const double dW = drivers.u[0].increments[n];
    const double c = scalar_coefficient(spec, t, S);
    if (transformed) {
      // W is linearly interpolated at the midpoint
      const double stage[3] = {beta, beta * std::exp(0.5 * c * dW - 0.25 * c * c * cfg.dt),
                               beta * std::exp(c * dW - 0.5 * c * c * cfg.dt)};
      if (particles) {
        rk4_with_particles(e, u, g, *particles, cfg.dt, stage);
        if (!jacobian_ok(*particles)) {
          hooks->jacobian_collapse_time = t + cfg.dt;
          hooks->particles.reset();
          particles = nullptr;
        }
      } else {
        e.rk4_from_k1(u, g, cfg.dt, stage);
      }
      beta = stage[2];
    } else {
      if (particles) {
        try {
          *particles = advect(*particles, to_field(Spectrum{grid, u}), 1.0, cfg.dt);
        } catch (const JacobianCollapse&) {
          hooks->jacobian_collapse_time = t + cfg.dt;
          hooks->particles.reset();
          particles = nullptr;
        }
      }
      double mu = 0.0, mg = 0.0;
      if (spec.is_general()) {
        const auto coeff = noise_coefficient(spec, t, S);
        for (int k = 0; k < K; ++k) {
          mu += coeff.u[k] * drivers.u[k].increments[n];
          mg += coeff.gamma[k] * drivers.gamma[k].increments[n];
        }
      } else {
        mu = mg = c * dW;
        if (cfg.method == Method::MilsteinLinear) {
          mu += 0.5 * c * c * (dW * dW - cfg.dt);
          mg = mu;
        }
        beta *= std::exp(c * dW - 0.5 * c * c * cfg.dt);
      }
      for (std::size_t j = 0; j < u.size(); ++j) {
        const Complex un = u[j], gn = g[j];
        u[j] = un + cfg.dt * e.k1u[j] + mu * un;
        g[j] = gn + cfg.dt * e.k1g[j] + mg * gn;
      }
    }
  }

  res.final_state = state_from_hats(grid, u, g, res.stop_time, frame);
  res.final_beta = beta;
  return res;
}

}  // namespace smch2
