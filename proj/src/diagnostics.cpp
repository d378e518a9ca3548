#include "smch2/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smch2/drift.hpp"
#include "smch2/error.hpp"

namespace smch2 {

double energy(const Field& v1, const Field& v2) {
  require_same_grid(v1, v2);
  return std::pow(sobolev_norm(v1, 1.0), 2) + std::pow(sobolev_norm(v2, 1.0), 2);
}

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::T37_GlobalWeak: return "T37_GlobalWeak";
    case Theorem::T38_BreakSlope: return "T38_BreakSlope";
    case Theorem::T39_BreakCubic: return "T39_BreakCubic";
    case Theorem::T35_StrongNoise: return "T35_StrongNoise";
  }
  return "?";
}

namespace {

void require_c(double c) {
  if (!(c > 0.0 && c < 1.0)) throw InvalidC("c must lie in (0, 1)");
}

void require_break_inputs(double E, double b_sup) {
  if (!(E >= 0.0)) throw InvalidParams("energy must be non-negative");
  if (!(b_sup > 0.0)) throw InvalidParams("b_sup must be positive");
}

}  // namespace

double threshold_break_slope(double E, double b_sup, double c) {
  require_c(c);
  require_break_inputs(E, b_sup);
  return -0.5 * std::sqrt(b_sup * b_sup / (c * c) + 4.0 * E) - b_sup / (2.0 * c);
}

double threshold_break_cubic(double E, double b_sup, double c) {
  require_c(c);
  require_break_inputs(E, b_sup);
  return -std::sqrt(b_sup * b_sup / (4.0 * c * c) * E * E + 15.0 / 8.0 * E * E * E) -
         b_sup / (2.0 * c) * E;
}

double threshold_global_weak(double b_star, double C_fit, double Q_fit, double lambda1, double R) {
  if (!(b_star > 0.0) || !(C_fit > 1.0) || !(Q_fit > 0.0) || !(lambda1 > 1.0) || !(R > 1.0))
    throw InvalidParams("need b_star > 0, C > 1, Q > 0, lambda1 > 1, R > 1");
  return b_star / (4.0 * C_fit * C_fit * Q_fit * Q_fit * lambda1 * lambda1 * R);
}

double process_bound(double lambda, double R) {
  if (!(lambda > 0.0) || !(R > 1.0)) throw InvalidParams("need lambda > 0 and R > 1");
  return 1.0 - std::pow(R, -2.0 * lambda);
}

bool check_strong_noise_regime(double a_star, double a_sup, double theta, double K_fit) {
  if (!(a_star > 0.0) || a_star > a_sup) return false;
  if (theta > 0.5) return 2.0 * a_star > a_sup;
  if (theta == 0.5) return 2.0 * a_star > K_fit + a_sup;
  return false;
}

ThresholdReport report_break_slope(double E, double b_sup, double c, double observed_slope) {
  ThresholdReport r;
  r.theorem = Theorem::T38_BreakSlope;
  r.inputs = {{"E", E}, {"b_sup", b_sup}, {"c", c}};
  r.formula = "u0x(x0) < -1/2 sqrt(b_sup^2/c^2 + 4E) - b_sup/(2c)";
  r.threshold = threshold_break_slope(E, b_sup, c);
  r.observed = observed_slope;
  r.satisfied = observed_slope < r.threshold;
  return r;
}

ThresholdReport report_break_cubic(double E, double b_sup, double c, double observed_cubic) {
  ThresholdReport r;
  r.theorem = Theorem::T39_BreakCubic;
  r.inputs = {{"E", E}, {"b_sup", b_sup}, {"c", c}};
  r.formula = "int u0x^3 < -sqrt(b_sup^2 E^2/(4c^2) + 15E^3/8) - b_sup E/(2c)";
  r.threshold = threshold_break_cubic(E, b_sup, c);
  r.observed = observed_cubic;
  r.satisfied = observed_cubic < r.threshold;
  return r;
}

ThresholdReport report_global_weak(double b_star, double C_fit, double Q_fit, double lambda1,
                                   double R, double observed) {
  ThresholdReport r;
  r.theorem = Theorem::T37_GlobalWeak;
  r.inputs = {{"b_star", b_star}, {"C_fit", C_fit}, {"Q_fit", Q_fit}, {"lambda1", lambda1}, {"R", R}};
  r.formula =
      "|u0|_Hs^2 + |g0|_Hs^2 < b_star/(4 C^2 Q^2 lambda1^2 R) "
      "(the proof carries 2 instead of 4 in the denominator)";
  r.threshold = threshold_global_weak(b_star, C_fit, Q_fit, lambda1, R);
  r.observed = observed;
  r.satisfied = observed < r.threshold;
  return r;
}

ThresholdReport report_strong_noise(double a_star, double a_sup, double theta, double K_fit) {
  ThresholdReport r;
  r.theorem = Theorem::T35_StrongNoise;
  r.inputs = {{"a_star", a_star}, {"a_sup", a_sup}, {"theta", theta}, {"K_fit", K_fit}};
  r.formula = "theta > 1/2 and 2 a_star > a_sup, or theta = 1/2 and 2 a_star > K + a_sup";
  r.threshold = theta == 0.5 ? K_fit + a_sup : a_sup;
  r.observed = 2.0 * a_star;
  r.satisfied = check_strong_noise_regime(a_star, a_sup, theta, K_fit);
  return r;
}

// ---------------------------------------------------------------- algebraic lemma

bool lemma24_in_regime(const Lemma24Params& p) {
  if (!(p.a > 0 && p.b_star > 0 && p.b_sup > 0 && p.c > 0 && p.M1 > 0 && p.M2 > 0)) return false;
  if (p.b_star > p.b_sup) return false;
  if (p.eta > 1.0) return 2.0 * p.b_star > p.b_sup;
  if (p.eta == 1.0) return 2.0 * p.b_star > p.a + p.b_sup;
  return false;
}

double lemma24_expression(const Lemma24Params& p, double x1, double x2, double y1, double y2) {
  const double Y = y1 * y1 + y2 * y2;
  const double X = x1 + x2;
  const double grow = std::pow(1.0 + X, p.eta);
  const double r = Y / (1.0 + Y);
  return p.a * X * r + p.b_sup * grow * r - 2.0 * p.b_star * grow * r * r +
         p.c * p.b_sup * grow * r * r / (1.0 + std::log1p(Y));
}

Lemma24Scan lemma24_scan_unchecked(const Lemma24Params& p, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw InvalidParams("scan needs samples");
  Lemma24Scan scan;
  scan.y_max = 1e6;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logy(-3.0, 6.0), frac(0.0, 1.0);
  scan.sup = lemma24_expression(p, 0, 0, 0, 0);
  for (int i = 0; i < n_samples; ++i) {
    // one coordinate may sit at zero
    const double y1 = i % 4 == 1 ? 0.0 : std::pow(10.0, logy(rng));
    const double y2 = i % 4 == 2 ? 0.0 : std::pow(10.0, logy(rng));
    const double x1 = p.M1 * y1 * frac(rng);
    const double x2 = p.M2 * y2 * frac(rng);
    const double v = lemma24_expression(p, x1, x2, y1, y2);
    if (v > scan.sup) {
      scan.sup = v;
      scan.x1 = x1;
      scan.x2 = x2;
      scan.y1 = y1;
      scan.y2 = y2;
    }
  }
  scan.interior = std::max(scan.y1, scan.y2) < 1e-2 * scan.y_max;
  for (int j = 1; j <= 6; ++j) {
    const double y = std::pow(10.0, j);
    scan.ray.push_back(lemma24_expression(p, p.M1 * y, 0.0, y, 0.0));
  }
  scan.ray_decreasing = true;
  for (std::size_t j = 3; j < scan.ray.size(); ++j)
    if (!(scan.ray[j] < scan.ray[j - 1])) scan.ray_decreasing = false;
  return scan;
}

Lemma24Scan lemma24_scan(const Lemma24Params& p, int n_samples, std::uint64_t seed) {
  if (!lemma24_in_regime(p)) {
    std::ostringstream os;
    os << "parameters outside the lemma's regime (eta=" << p.eta << ", 2 b_star=" << 2 * p.b_star
       << ", b_sup=" << p.b_sup << ", a=" << p.a << ")";
    throw RegimeViolation(os.str());
  }
  return lemma24_scan_unchecked(p, n_samples, seed);
}

// ---------------------------------------------------------------- probes

double commutator_probe(const Field& g, const Field& f, double eps) {
  require_same_grid(g, f);
  const double denom = w1inf_norm(g) * sobolev_norm(f, 0.0);
  if (denom == 0.0) return 0.0;
  const Field a = mollify(pointwise_product(g, derivative(f)), eps, MollifierKind::Tepsilon);
  const Field b = pointwise_product(g, derivative(mollify(f, eps, MollifierKind::Tepsilon)));
  return sobolev_norm(a - b, 0.0) / denom;
}

double energy_inequality_probe(const Field& v1, const Field& v2, double s) {
  require_same_grid(v1, v2);
  const double S = w1inf_norm(v1) + w1inf_norm(v2);
  const double H = std::pow(sobolev_norm(v1, s), 2) + std::pow(sobolev_norm(v2, s), 2);
  if (S == 0.0 || H == 0.0) return 0.0;
  const auto [d1, d2] = drift(State{v1, v2, 0.0, Frame::Physical});
  return (sobolev_inner(v1, d1, s) + sobolev_inner(v2, d2, s)) / (S * H);
}

double mollified_energy_probe(const Field& u, const Field& gamma, double eps, double s) {
  require_same_grid(u, gamma);
  const double S = w1inf_norm(u) + w1inf_norm(gamma);
  const double H = std::pow(sobolev_norm(u, s), 2) + std::pow(sobolev_norm(gamma, s), 2);
  if (S == 0.0 || H == 0.0) return 0.0;
  auto T = [eps](const Field& f) { return mollify(f, eps, MollifierKind::Tepsilon); };
  const Field Tu = T(u), Tg = T(gamma);
  const Field uux = dealias(pointwise_product(u, derivative(u)));
  const Field ugx = dealias(pointwise_product(u, derivative(gamma)));
  const double lhs = std::abs(sobolev_inner(T(uux), Tu, s)) +
                     std::abs(sobolev_inner(T(f1(u, gamma)), Tu, s)) +
                     std::abs(sobolev_inner(T(ugx), Tg, s)) +
                     std::abs(sobolev_inner(T(f2(u, gamma)), Tg, s));
  return lhs / (S * H);
}

double f1_bound_ratio(const Field& u, const Field& gamma, double s) {
  const double S = w1inf_norm(u) + w1inf_norm(gamma);
  const double H = sobolev_norm(u, s) + sobolev_norm(gamma, s);
  if (S == 0.0 || H == 0.0) return 0.0;
  return sobolev_norm(f1(u, gamma), s) / (S * H);
}

double f1_lipschitz_ratio(const Field& u1, const Field& g1, const Field& u2, const Field& g2,
                          double s) {
  const double d = sobolev_norm(u1 - u2, s) + sobolev_norm(g1 - g2, s);
  if (d == 0.0) return 0.0;
  return sobolev_norm(f1(u1, g1) - f1(u2, g2), s) / d;
}

double embedding_ratio(const Field& f, double s) {
  const double h = sobolev_norm(f, s);
  return h == 0.0 ? 0.0 : w1inf_norm(f) / h;
}

Field random_profile(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, 3);
  std::uniform_real_distribution<double> centre(-1.0, 1.0), width(0.4, 1.2), amp(-1.0, 1.0);
  const int m = count(rng);
  std::vector<double> A(m), c(m), w(m);
  for (int i = 0; i < m; ++i) {
    A[i] = amp(rng);
    c[i] = centre(rng);
    w[i] = width(rng);
  }
  return Field::from_function(grid, [&](double x) {
    double v = 0.0;
    for (int i = 0; i < m; ++i) v += A[i] * std::exp(-std::pow((x - c[i]) / w[i], 2));
    return v;
  });
}

FittedConstants fit_constants(const GridPtr& grid, int suite_size, std::uint64_t seed, double s) {
  if (suite_size < 1) throw InvalidParams("suite needs at least one member");
  FittedConstants fc;
  fc.suite_size = suite_size;
  fc.seed = seed;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < suite_size; ++i) {
    const Field u = random_profile(grid, rng);
    const Field g = random_profile(grid, rng);
    fc.C_raw = std::max(fc.C_raw, 2.0 * std::abs(energy_inequality_probe(u, g, s)));
    fc.Q_fit = std::max({fc.Q_fit, embedding_ratio(u, s), embedding_ratio(g, s)});
    for (double eps : {0.5, 0.1, 0.02})
      fc.K_fit = std::max(fc.K_fit, mollified_energy_probe(u, g, eps, s));
  }
  fc.C_fit = std::max(fc.C_raw, 1.1);
  return fc;
}

}  // namespace smch2
