#ifndef SMCH2_DIAGNOSTICS_HPP
#define SMCH2_DIAGNOSTICS_HPP

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "smch2/spectral_field.hpp"

namespace smch2 {

/// |v1|_{H1}^2 + |v2|_{H1}^2.
double energy(const Field& v1, const Field& v2);

enum class Theorem { T37_GlobalWeak, T38_BreakSlope, T39_BreakCubic, T35_StrongNoise };
const char* to_string(Theorem t);

struct ThresholdReport {
  Theorem theorem = Theorem::T38_BreakSlope;
  std::vector<std::pair<std::string, double>> inputs;
  std::string formula;
  double threshold = 0.0;
  double observed = 0.0;
  bool satisfied = false;
};

/// -1/2 sqrt(b*^2/c^2 + 4E) - b*/(2c), b* the upper bound of b^2.
double threshold_break_slope(double E, double b_sup, double c);
/// -sqrt(b*^2 E^2/(4c^2) + 15 E^3/8) - b* E/(2c).
double threshold_break_cubic(double E, double b_sup, double c);
/// b_star / (4 C^2 Q^2 lambda1^2 R), b_star the lower bound of b^2.
double threshold_global_weak(double b_star, double C_fit, double Q_fit, double lambda1, double R);
/// 1 - R^{-2 lambda}.
double process_bound(double lambda, double R);
bool check_strong_noise_regime(double a_star, double a_sup, double theta, double K_fit);

/// Observed slope must lie below the threshold.
ThresholdReport report_break_slope(double E, double b_sup, double c, double observed_slope);
ThresholdReport report_break_cubic(double E, double b_sup, double c, double observed_cubic);
/// Observed |u0|_{H^s}^2 + |gamma0|_{H^s}^2 must lie below the threshold.
ThresholdReport report_global_weak(double b_star, double C_fit, double Q_fit, double lambda1,
                                   double R, double observed);
ThresholdReport report_strong_noise(double a_star, double a_sup, double theta, double K_fit);

// ---------------------------------------------------------------- algebraic lemma

struct Lemma24Params {
  double a = 1.0;
  double b_star = 2.0;
  double b_sup = 3.0;
  double eta = 2.0;
  double c = 1.0;
  double M1 = 1.0;
  double M2 = 1.0;
};

/// True iff (eta > 1 and 2 b_star > b_sup) or (eta == 1 and 2 b_star > a + b_sup).
bool lemma24_in_regime(const Lemma24Params& p);

/// Left-hand side with b(t) taken at its worst case: b_sup on the growth
/// terms, b_star on the damping term.
double lemma24_expression(const Lemma24Params& p, double x1, double x2, double y1, double y2);

struct Lemma24Scan {
  double sup = 0.0;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;  // argmax
  double y_max = 0.0;                     // scan boundary
  bool interior = false;                  // argmax well inside the scan box
  std::vector<double> ray;                // values along x1 = y1 = 10^j, j = 1..6
  bool ray_decreasing = false;            // strictly decreasing for j >= 3
};

/// Randomized log-spaced scan; throws RegimeViolation outside the lemma's regime.
Lemma24Scan lemma24_scan(const Lemma24Params& p, int n_samples, std::uint64_t seed);
/// Same scan without the regime check (for exhibiting the violating case).
Lemma24Scan lemma24_scan_unchecked(const Lemma24Params& p, int n_samples, std::uint64_t seed);

// ---------------------------------------------------------------- inequality probes

/// |T_eps(g f_x) - g (T_eps f)_x|_{L2} / (|g|_{W1,inf} |f|_{L2}); 0 for zero input.
double commutator_probe(const Field& g, const Field& f, double eps);

/// (v1, drift_1)_{H^s} + (v2, drift_2)_{H^s} over (W^{1,inf} sum)(H^s norms squared sum),
/// drift without dealiasing; 0 for the zero state.
double energy_inequality_probe(const Field& v1, const Field& v2, double s = 2.0);

/// Mollified version: sum of |(T_eps X, T_eps Y)_{H^s}| pairings over the same normalization.
double mollified_energy_probe(const Field& u, const Field& gamma, double eps, double s = 2.0);

/// |F1|_{H^s} / ((W^{1,inf} sum)(H^s sum)).
double f1_bound_ratio(const Field& u, const Field& gamma, double s = 2.0);
/// |F1(u1,g1) - F1(u2,g2)|_{H^s} / (|u1-u2|_{H^s} + |g1-g2|_{H^s}).
double f1_lipschitz_ratio(const Field& u1, const Field& g1, const Field& u2, const Field& g2,
                          double s = 2.0);

/// w1inf / H^s.
double embedding_ratio(const Field& f, double s = 2.0);

/// Random smooth decaying profile: 2 or 3 Gaussian bumps, centres in [-1, 1],
/// widths in [0.4, 1.2], amplitudes in [-1, 1].
Field random_profile(const GridPtr& grid, std::mt19937_64& rng);

struct FittedConstants {
  double C_fit = 0.0;  // 2 sup of the energy-inequality ratio, floored at 1.1
  double Q_fit = 0.0;  // sup of the embedding ratio at s = 2
  double K_fit = 0.0;  // sup of the mollified energy ratio over eps in {0.5, 0.1, 0.02}
  double C_raw = 0.0;
  int suite_size = 0;
  std::uint64_t seed = 0;
};

FittedConstants fit_constants(const GridPtr& grid, int suite_size, std::uint64_t seed,
                              double s = 2.0);

}  // namespace smch2

#endif
