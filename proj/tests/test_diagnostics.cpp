#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "smch2/diagnostics.hpp"
#include "smch2/error.hpp"

using namespace smch2;
using std::numbers::pi;

TEST_SUITE("diagnostics") {

TEST_CASE("energy") {
  auto g = make_grid(64, pi);
  Field c = Field::from_function(g, [](double x) { return std::cos(x); });
  Field zero = Field::constant(g, 0);
  CHECK(energy(c, zero) == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(energy(zero, zero) == 0.0);

  auto g2 = make_grid(512, 20);
  auto f = [](double x) { return std::exp(-x * x); };
  auto h = [](double x) { return 0.5 * std::exp(-(x - 1) * (x - 1) / 2); };
  auto fx = [](double x) { return -2 * x * std::exp(-x * x); };
  auto hx = [](double x) { return -0.5 * (x - 1) * std::exp(-(x - 1) * (x - 1) / 2); };
  const double q = oracle::integrate(
      [&](double x) { return f(x) * f(x) + fx(x) * fx(x) + h(x) * h(x) + hx(x) * hx(x); }, -20, 20, 400);
  CHECK(std::abs(energy(Field::from_function(g2, f), Field::from_function(g2, h)) - q) < 1e-10);
  CHECK_THROWS_AS(energy(c, Field::constant(g2, 0)), GridMismatch);
}

TEST_CASE("breaking thresholds") {
  CHECK(threshold_break_slope(1, 1, 0.5) == doctest::Approx(-std::sqrt(2.0) - 1).epsilon(1e-14));
  CHECK(threshold_break_slope(1, 1, 0.9) ==
        doctest::Approx(-0.5 * std::sqrt(1 / 0.81 + 4) - 1 / 1.8).epsilon(1e-14));
  CHECK(threshold_break_slope(1, 1, 0.9) == doctest::Approx(-1.6995145).epsilon(1e-7));
  CHECK(threshold_break_slope(0, 1e-12, 0.5) < 0);
  CHECK(threshold_break_slope(0, 1e-12, 0.5) > -1e-10);
  CHECK(threshold_break_cubic(1, 1, 0.5) == doctest::Approx(-std::sqrt(2.875) - 1).epsilon(1e-14));
  CHECK(threshold_break_cubic(0, 1, 0.5) == 0.0);
  CHECK(threshold_break_cubic(2, 1, 0.5) == doctest::Approx(-std::sqrt(19.0) - 2).epsilon(1e-14));
  CHECK_THROWS_AS(threshold_break_slope(1, 1, 1.0), InvalidC);
  CHECK_THROWS_AS(threshold_break_cubic(1, 1, 0.0), InvalidC);

  auto r = report_break_slope(1, 1, 0.5, -3.0);
  CHECK(r.satisfied);
  CHECK(r.threshold == doctest::Approx(-2.4142136));
  CHECK_FALSE(report_break_slope(1, 1, 0.5, -2.0).satisfied);
  CHECK(report_break_cubic(1, 1, 0.5, -3.0).satisfied);
}

TEST_CASE("global and strong-noise regimes") {
  CHECK(threshold_global_weak(1, 2, 1, 2, 2) == doctest::Approx(1.0 / 128));
  CHECK(threshold_global_weak(1, 2, 1, 2, 1e12) < 1e-13);
  CHECK(process_bound(0.4, 2) == doctest::Approx(1 - std::pow(2.0, -0.8)));
  CHECK(process_bound(0.4, 2) == doctest::Approx(0.42565).epsilon(1e-5));
  CHECK(process_bound(1, 2) == 0.75);
  CHECK_THROWS_AS(threshold_global_weak(1, 1, 1, 2, 2), InvalidParams);
  CHECK(report_global_weak(1, 2, 1, 2, 2, 0.001).satisfied);
  CHECK_FALSE(report_global_weak(1, 2, 1, 2, 2, 0.01).satisfied);

  CHECK(check_strong_noise_regime(1, 1, 1, 0));
  CHECK_FALSE(check_strong_noise_regime(1, 3, 1, 0));
  CHECK(check_strong_noise_regime(2, 2, 0.5, 1.5));
  CHECK_FALSE(check_strong_noise_regime(2, 2, 0.5, 2.5));
  CHECK_FALSE(check_strong_noise_regime(1, 1, 0.3, 0));
  CHECK_FALSE(check_strong_noise_regime(2, 1, 0.5, 2.5));
  CHECK(report_strong_noise(1, 1, 1, 0.3).satisfied);
}

TEST_CASE("lemma 2.4 scan") {
  Lemma24Params p;  // a=1, b_star=2, b_sup=3, eta=2, c=1, M=1
  CHECK(lemma24_in_regime(p));
  CHECK(std::isfinite(lemma24_expression(p, 0, 0, 0, 0)));
  CHECK(lemma24_expression(p, 0, 0, 0, 0) == 0.0);
  auto s = lemma24_scan(p, 200000, 7);
  CHECK(std::isfinite(s.sup));
  CHECK(s.interior);
  CHECK(s.ray_decreasing);

  Lemma24Params bad = p;
  bad.b_star = 1;
  CHECK_FALSE(lemma24_in_regime(bad));
  CHECK_THROWS_AS(lemma24_scan(bad, 100, 7), RegimeViolation);
  auto v = lemma24_scan_unchecked(bad, 1000, 7);
  for (std::size_t j = 1; j < v.ray.size(); ++j) CHECK(v.ray[j] > v.ray[j - 1]);

  Lemma24Params lin = p;
  lin.eta = 1;
  lin.b_star = 2.5;  // 5 > 1 + 3
  CHECK(lemma24_in_regime(lin));
  lin.b_star = 1.9;
  CHECK_FALSE(lemma24_in_regime(lin));
}

TEST_CASE("probes") {
  auto g = make_grid(256, 10);
  std::mt19937_64 rng(12);
  Field f = Field::from_function(g, oracle::random_gaussians(rng));
  Field zero = Field::constant(g, 0);
  CHECK(commutator_probe(Field::constant(g, 2.0), f, 0.3) < 1e-12);
  CHECK(commutator_probe(f, zero, 0.3) == 0.0);
  CHECK(energy_inequality_probe(zero, zero) == 0.0);

  auto gp = make_grid(64, pi);
  Field c = Field::from_function(gp, [](double x) { return std::cos(x); });
  const double a = energy_inequality_probe(c, Field::constant(gp, 0));
  const double b = energy_inequality_probe(c, Field::constant(gp, 0));
  CHECK(std::isfinite(a));
  CHECK(a == b);

  CHECK(embedding_ratio(zero) == 0.0);
  CHECK(f1_bound_ratio(zero, zero) == 0.0);
  Field h = Field::from_function(g, oracle::random_gaussians(rng));
  CHECK(std::isfinite(f1_lipschitz_ratio(f, h, h, f)));
}

TEST_CASE("fitted constants are stable across suites") {
  auto g = make_grid(256, 10);
  auto a = fit_constants(g, 2048, 1);
  auto b = fit_constants(g, 2048, 2);
  CHECK(a.C_fit >= 1.1);
  CHECK(a.Q_fit > 0);
  CHECK(a.K_fit > 0);
  CHECK(std::abs(a.C_raw - b.C_raw) <= 0.2 * std::max(a.C_raw, b.C_raw));
  CHECK(std::abs(a.Q_fit - b.Q_fit) <= 0.2 * std::max(a.Q_fit, b.Q_fit));
  CHECK(std::abs(a.K_fit - b.K_fit) <= 0.2 * std::max(a.K_fit, b.K_fit));
  auto again = fit_constants(g, 2048, 1);
  CHECK(again.C_raw == a.C_raw);
}

}
