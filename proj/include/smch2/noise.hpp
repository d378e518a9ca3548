#ifndef SMCH2_NOISE_HPP
#define SMCH2_NOISE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smch2/spectral_field.hpp"

namespace smch2 {

/// Seeded increments of one scalar Wiener process on a uniform time grid.
struct BrownianPath {
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::vector<double> increments;

  int n_steps() const noexcept { return static_cast<int>(increments.size()); }
  /// W(t_m) = sum_{i<m} dW_i, m in [0, n_steps].
  std::vector<double> cumulative() const;
};

/// splitmix64 of (master, index); used for all per-path and per-stream seeds.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

BrownianPath sample_brownian(std::uint64_t seed, double dt, int n_steps);

/// W2 increments = kappa dW1 + sqrt(1 - kappa^2) dW_perp, dW_perp drawn from seed2.
std::pair<BrownianPath, BrownianPath> correlated_pair(const BrownianPath& path1, double kappa,
                                                      std::uint64_t seed2);

/// Sums `factor` consecutive increments; the step count must divide evenly.
BrownianPath coarsen(const BrownianPath& path, int factor);

using TimeFn = std::function<double(double)>;

TimeFn constant_fn(double value);

/// b(t) u dW, b(t) gamma dW with b_star <= b^2 <= b_sup.
struct LinearB {
  TimeFn b;
  double b_star = 0.0;
  double b_sup = 0.0;
};

/// a(t) (1 + |u|_{W1,inf} + |gamma|_{W1,inf})^theta (u, gamma) dW with
/// a_star <= a^2 <= a_sup.
struct NonlinearTheta {
  TimeFn a;
  double theta = 1.0;
  double a_star = 0.0;
  double a_sup = 0.0;
};

/// Finite-mode truncation of cylindrical noise. Mode k of the u equation is
/// sigma_k c_k S/(1+S) u dW_k with S the W^{1,inf} sum; the gamma equation uses
/// the same coefficients and kappa-correlated drivers.
struct GeneralHS {
  std::vector<double> mode_coeffs;
  std::vector<double> sigma;

  static GeneralHS with_defaults(int modes = 16);
  /// Declared growth function f(S) = |sigma c|_2 S/(1+S).
  double growth(double S) const;
};

struct NoiseSpec {
  std::variant<LinearB, NonlinearTheta, GeneralHS> model;
  double kappa = 1.0;

  static NoiseSpec none();
  static NoiseSpec linear(double b, double b_star, double b_sup);
  static NoiseSpec linear(double b);
  static NoiseSpec nonlinear(double a, double theta, double a_star, double a_sup);
  static NoiseSpec general(GeneralHS hs, double kappa);

  bool is_linear() const noexcept { return std::holds_alternative<LinearB>(model); }
  bool is_nonlinear() const noexcept { return std::holds_alternative<NonlinearTheta>(model); }
  bool is_general() const noexcept { return std::holds_alternative<GeneralHS>(model); }
  /// Number of scalar drivers per equation (1, or the mode count).
  int drivers() const;
  /// Throws InvalidParams / InvalidKappa for malformed bounds.
  void validate() const;
  std::string name() const;
};

/// Multipliers of u and gamma for each driver at time t. Scalar families
/// return one entry (the same for u and gamma).
struct NoiseCoefficient {
  std::vector<double> u;
  std::vector<double> gamma;
};

/// Throws SpecViolation if a^2 or b^2 leaves its declared bounds,
/// FrameMismatch for transformed states.
NoiseCoefficient noise_coefficient(const NoiseSpec& spec, double t, const State& state);
/// Same, given the W^{1,inf} sum directly.
NoiseCoefficient noise_coefficient(const NoiseSpec& spec, double t, double w1inf_sum);

/// beta(t) = exp(int b dW - int b^2/2 dt), alpha(t) = exp(int b dW), with left-point
/// sums; both series have n_steps + 1 entries.
std::pair<std::vector<double>, std::vector<double>> exponential_processes(const BrownianPath& path,
                                                                          const TimeFn& b);

}  // namespace smch2

#endif
