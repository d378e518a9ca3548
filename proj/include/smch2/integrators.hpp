#ifndef SMCH2_INTEGRATORS_HPP
#define SMCH2_INTEGRATORS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smch2/characteristics.hpp"
#include "smch2/drift.hpp"
#include "smch2/noise.hpp"
#include "smch2/spectral_field.hpp"

namespace smch2 {

enum class Method { EulerMaruyama, MilsteinLinear, TransformedRK4 };
enum class StopReason { Completed, BlowupW1inf, BlowupHs, NonFinite };

const char* to_string(Method m);
const char* to_string(StopReason r);
Method method_from_string(const std::string& s);

struct StepperConfig {
  Method method = Method::TransformedRK4;
  double dt = 1e-3;
  double t_end = 1.0;
  /// Thresholds apply to the W^{1,inf} sum and the H^s sum of the physical
  /// solution (u, gamma) = beta (v1, v2), checked at every step.
  double blowup_w1inf = 1e3;
  double blowup_hs = 1e6;
  double s_monitor = 2.0;
  int output_stride = 10;
  DriftOptions drift;

  bool operator==(const StepperConfig&) const = default;
  int n_steps() const;
  void validate() const;
};

struct Sample {
  double t = 0, Hs_u = 0, Hs_g = 0, w1inf_u = 0, w1inf_g = 0, min_ux = 0, energy = 0, beta = 1;
};

struct RunResult {
  std::vector<Sample> series;
  StopReason stop_reason = StopReason::Completed;
  double stop_time = 0.0;
  std::uint64_t seed = 0;
  /// Final integrated state (physical for direct methods, transformed otherwise).
  State final_state;
  double final_beta = 1.0;

  std::vector<double> times() const;
  bool blew_up() const noexcept {
    return stop_reason == StopReason::BlowupW1inf || stop_reason == StopReason::BlowupHs;
  }
  /// Physical (u, gamma) at stop.
  State final_physical() const;
};

/// Hooks into a single path. Particles are integrated together with the
/// field in the transformed frame; the observer sees every output sample.
struct PathHooks {
  std::optional<ParticleSet> particles;
  /// Called at t = 0, every `observer_stride` steps and at stop, with the
  /// integrated state, beta and the tracked particles (if any).
  std::function<void(const State&, double beta, const ParticleSet*)> observer;
  int observer_stride = 0;  // 0: use the output stride
  /// Set when a particle Jacobian reaches zero; tracking stops there.
  std::optional<double> jacobian_collapse_time;
};

/// Drivers for one path: one increment sequence per scalar driver of the u
/// equation and of the gamma equation (identical for the scalar families).
struct NoiseDrivers {
  std::vector<BrownianPath> u;
  std::vector<BrownianPath> gamma;
};

NoiseDrivers make_drivers(const NoiseSpec& spec, double dt, int n_steps, std::uint64_t seed);
NoiseDrivers scalar_drivers(const BrownianPath& path);

/// One direct step. `dw_u` / `dw_g` carry one increment per driver.
/// Throws NonFinite on non-finite output.
State step_direct(const State& state, const NoiseSpec& spec, std::span<const double> dw_u,
                  std::span<const double> dw_g, double dt, const DriftOptions& opts, Method method,
                  bool with_drift = true);
State step_direct(const State& state, const NoiseSpec& spec, double dw, double dt,
                  const DriftOptions& opts, Method method, bool with_drift = true);

/// Classical RK4 for v_t = beta(t) D(v) with D the deterministic drift.
State step_transformed(const State& v_state, const std::function<double(double)>& beta, double dt,
                       const DriftOptions& opts = {});
State step_transformed(const State& v_state, double beta_now, double dt,
                       const DriftOptions& opts = {});

State reconstruct_physical(const State& v_state, double beta_now);
State to_transformed(const State& u_state, double beta_now);

RunResult run_path(const Field& u0, const Field& gamma0, const NoiseSpec& spec,
                   const StepperConfig& cfg, std::uint64_t seed, PathHooks* hooks = nullptr);
RunResult run_path(const Field& u0, const Field& gamma0, const NoiseSpec& spec,
                   const StepperConfig& cfg, const NoiseDrivers& drivers, std::uint64_t seed,
                   PathHooks* hooks = nullptr);

}  // namespace smch2

#endif
