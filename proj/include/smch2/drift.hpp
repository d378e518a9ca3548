#ifndef SMCH2_DRIFT_HPP
#define SMCH2_DRIFT_HPP

#include <utility>
#include <vector>

#include "smch2/spectral_field.hpp"

namespace smch2 {

struct DriftOptions {
  bool use_cutoff = false;
  double R = 2.0;
  bool use_mollified = false;
  double eps = 0.1;
  bool dealias = true;

  bool operator==(const DriftOptions&) const = default;
  /// Throws InvalidParams / InvalidEpsilon on inconsistent options.
  void validate() const;
};

/// Smooth cut-off: 1 on [0, R], 0 on [2R, inf), value 1/2 at 1.5 R.
double cutoff_chi(double x, double R);

/// d_x (1 - d_xx)^{-1} (u^2 + u_x^2/2 + gamma^2/2 - gamma_x^2/2)
Field f1(const Field& u, const Field& gamma, bool dealias = true);
/// (1 - d_xx)^{-1} ((u_x gamma_x)_x + u_x gamma)
Field f2(const Field& u, const Field& gamma, bool dealias = true);

/// (-u u_x - F1, -u gamma_x - F2), with optional cut-off and mollification.
std::pair<Field, Field> drift(const State& state, const DriftOptions& opts = {});

/// Reusable buffers for the drift evaluated directly on spectra. One
/// workspace per thread; not shareable.
class DriftWorkspace {
 public:
  DriftWorkspace(GridPtr grid, DriftOptions opts);

  /// Writes the spectra of both drift components. Inputs and outputs are
  /// half spectra of length n/2+1; outputs must not alias inputs.
  void evaluate(std::span<const Complex> u_hat, std::span<const Complex> g_hat,
                std::span<Complex> du_hat, std::span<Complex> dg_hat);

  /// Last W^{1,inf} sum seen by `evaluate` (useful to callers for free).
  double last_w1inf_sum() const noexcept { return last_w1inf_sum_; }
  /// Cut-off value applied by the last `evaluate` (1 without cut-off).
  double last_chi() const noexcept { return last_chi_; }

  const GridPtr& grid() const noexcept { return grid_; }
  const DriftOptions& options() const noexcept { return opts_; }

 private:
  void to_grid(std::span<const Complex> hat, double k_power, std::vector<double>& out);
  void to_hat(const std::vector<double>& values, std::vector<Complex>& out);

  GridPtr grid_;
  DriftOptions opts_;
  std::vector<double> mult_dx_h_;   // k / (1 + k^2)
  std::vector<double> mult_h_;      // 1 / (1 + k^2)
  std::vector<double> mollifier_;
  std::vector<Complex> a_hat_, b_hat_, tmp_hat_;
  std::vector<Complex> p1_, p2_, p3_, p4_, p5_;
  std::vector<double> u_, ux_, g_, gx_, ju_, jux_, jgx_, work_;
  double last_w1inf_sum_ = 0.0;
  double last_chi_ = 1.0;
};

}  // namespace smch2

#endif
