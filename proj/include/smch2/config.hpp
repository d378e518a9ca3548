#ifndef SMCH2_CONFIG_HPP
#define SMCH2_CONFIG_HPP

#include <cstdint>
#include <string>
#include <variant>

#include "smch2/integrators.hpp"
#include "smch2/noise.hpp"
#include "smch2/spectral_field.hpp"

namespace smch2 {

struct GaussianBump {
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  bool operator==(const GaussianBump&) const = default;
};

/// amplitude * e^{-|x - center|} convolved with a Gaussian of std `smoothing`.
struct SmoothedPeakon {
  double amplitude = 1.0;
  double smoothing = 0.1;
  double center = 0.0;
  bool operator==(const SmoothedPeakon&) const = default;
};

/// Smoothed antipeakon at -separation/2 and peakon at +separation/2: momentum
/// is <= 0 left of the centre and >= 0 right of it.
struct PeakonAntipeakon {
  double amplitude = 1.0;
  double separation = 1.0;
  double smoothing = 0.1;
  double center = 0.0;
  bool operator==(const PeakonAntipeakon&) const = default;
};

/// -A x e^{-x^2/w^2} with A = -slope_target, so u0x(0) = slope_target.
struct BreakingProfile {
  double slope_target = -3.0;
  double c = 0.5;
  double b_sup = 1.0;
  double width = 0.5;
  bool operator==(const BreakingProfile&) const = default;
};

struct ZeroData {
  bool operator==(const ZeroData&) const = default;
};

using InitialDataSpec =
    std::variant<ZeroData, GaussianBump, SmoothedPeakon, PeakonAntipeakon, BreakingProfile>;

/// Throws DecayViolation if |f(+-L)| >= 1e-12.
Field make_initial_data(const InitialDataSpec& spec, const GridPtr& grid);

enum class NoiseKind { None, LinearB, NonlinearTheta, GeneralHS };

/// Serializable noise parameters (constant-in-time coefficients).
struct NoiseParams {
  NoiseKind kind = NoiseKind::None;
  double b = 0.0, b_star = 0.0, b_sup = 0.0;
  double a = 1.0, theta = 1.0, a_star = 1.0, a_sup = 1.0;
  int modes = 16;
  double kappa = 1.0;
  bool operator==(const NoiseParams&) const = default;

  NoiseSpec to_spec() const;
};

struct ScenarioParams {
  double c = 0.5;          // breaking scenarios
  double lambda = 1.0;     // lemma25
  double alpha = 1.0;      // lemma25, constant
  double R = 2.0;          // lemma25, global-weak
  double lambda1 = 2.0;    // global-weak
  double lambda2 = 0.4;    // global-weak
  int particles = 64;      // sign-preserve, blowup-slope
  double particle_lo = -2.5;
  double particle_hi = 2.5;
  int fit_suite = 2048;     // fitted constants
  int bound_paths = 10000; // Monte Carlo size for bound estimates
  double bound_dt = 1e-3;
  bool operator==(const ScenarioParams&) const = default;
};

struct RunConfig {
  int n = 256;
  double L = 20.0;
  InitialDataSpec u0 = GaussianBump{};
  InitialDataSpec gamma0 = ZeroData{};
  NoiseParams noise;
  /// t_end is the ensemble horizon and output_stride the output stride.
  StepperConfig stepper = default_stepper();
  int n_paths = 1;
  std::uint64_t master_seed = 1;
  std::string directory = "out";
  int record_paths = 4;  // paths written as time-series CSV
  ScenarioParams scenario;

  static StepperConfig default_stepper();
  bool operator==(const RunConfig&) const = default;
};

/// JSON text to a validated config; missing keys take their defaults.
/// Throws ConfigRejected with one message per offending field.
RunConfig parse_config(const std::string& text);
std::string serialize(const RunConfig& cfg);

/// Grid energy |u0|_{H1}^2 + |gamma0|_{H1}^2 of the configured data.
double initial_energy(const RunConfig& cfg);

}  // namespace smch2

#endif
