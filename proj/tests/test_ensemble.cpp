#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "smch2/ensemble.hpp"
#include "smch2/error.hpp"

using namespace smch2;

namespace {

StepperConfig short_run() {
  StepperConfig cfg;
  cfg.t_end = 0.05;
  return cfg;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("wilson statistics") {
  auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo < 0.5);
  CHECK(hi > 0.5);
  CHECK(hi - lo == doctest::Approx(2 * 1.96 * std::sqrt(0.25 / 100 + 1.96 * 1.96 / 40000) /
                                   (1 + 1.96 * 1.96 / 100)));
  CHECK(wilson_se(0, 100) > 0);
  CHECK(wilson_se(50, 100) == doctest::Approx(std::sqrt(0.0025 + 0.000025) / 1.01));
}

TEST_CASE("zero data ensemble") {
  auto g = make_grid(32, 5);
  Field zero = Field::constant(g, 0);
  auto s = run_ensemble(zero, zero, NoiseSpec::linear(0.5), short_run(), 10, 1);
  CHECK(s.p_hat == 0.0);
  CHECK(s.n_completed == 10);
  CHECK(s.records.size() == 10);
  CHECK(s.ci_low <= s.p_hat);
  CHECK(s.p_hat <= s.ci_high);
}

TEST_CASE("deterministic blow-up is seen by every path") {
  auto g = make_grid(512, 10);
  Field zero = Field::constant(g, 0);
  Field u0 = Field::from_function(g, [](double x) { return -3 * x * std::exp(-x * x / 0.25); });
  StepperConfig cfg;
  cfg.t_end = 1.0;
  cfg.dt = 5e-4;
  cfg.blowup_w1inf = 5.0;
  auto s = run_ensemble(u0, zero, NoiseSpec::linear(0.0), cfg, 10, 3);
  CHECK(s.p_hat == 1.0);
  CHECK(s.n_blowup + s.n_completed + s.n_nonfinite == s.n_paths);
  for (const auto& r : s.records) CHECK(r.stop_time == s.records[0].stop_time);
}

TEST_CASE("summaries are reproducible and independent of workers") {
  auto g = make_grid(64, 10);
  Field u0 = Field::from_function(g, [](double x) { return std::exp(-x * x); });
  auto cfg = short_run();
  cfg.blowup_w1inf = 1.2;  // some paths cross through beta alone
  EnsembleOptions one;
  one.workers = 1;
  EnsembleOptions three;
  three.workers = 3;
  auto a = run_ensemble(u0, u0 * 0.0, NoiseSpec::linear(1.0), cfg, 12, 77, one);
  auto b = run_ensemble(u0, u0 * 0.0, NoiseSpec::linear(1.0), cfg, 12, 77, three);
  CHECK(a.n_blowup == b.n_blowup);
  CHECK(a.p_hat == b.p_hat);
  for (int i = 0; i < 12; ++i) {
    CHECK(a.records[i].seed == b.records[i].seed);
    CHECK(a.records[i].stop_time == b.records[i].stop_time);
    CHECK(a.records[i].max_w1inf == b.records[i].max_w1inf);
  }
  CHECK(a.records[0].seed == split_seed(77, 0));
}

TEST_CASE("lemma 2.5 experiment") {
  auto e = lemma25_experiment(constant_fn(1.0), 1.0, 2.0, 10.0, 1e-3, 2000, 5);
  CHECK(e.bound == 0.75);
  CHECK(e.p_hat >= 0.75 - 3 * e.se);
  auto wide = lemma25_experiment(constant_fn(1.0), 1.0, 1e6, 1.0, 1e-3, 500, 5);
  CHECK(wide.bound == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(wide.p_hat == 1.0);
  CHECK_THROWS_AS(lemma25_experiment(constant_fn(1.0), 1.0, 0.5, 1.0, 1e-3, 10, 5), InvalidParams);
}

TEST_CASE("breaking bound") {
  auto small_c = breaking_bound_mc(constant_fn(1.0), 1.0, 1e-12, 1.0, 1e-3, 500, 9);
  CHECK(small_c.p_hat == 1.0);
  // b = sqrt(b_sup): {min W >= ln c / sqrt(b_sup)}
  const double b_sup = 0.25, c = 0.5, T = 1.0;
  auto e = breaking_bound_mc(constant_fn(0.5), b_sup, c, T, 1e-4, 4000, 11);
  const double ref = oracle::reflection_min(-std::log(c) / std::sqrt(b_sup), T);
  CHECK(std::abs(e.p_hat - ref) < 3 * e.se);
  CHECK_THROWS_AS(breaking_bound_mc(constant_fn(1.0), 1.0, 1.5, 1.0, 1e-3, 10, 1), InvalidC);
  // b = 0 leaves the process at exp(b_sup t/2) >= 1 > c
  CHECK(breaking_bound_mc(constant_fn(0.0), 0.25, 0.5, 1.0, 1e-3, 50, 1).p_hat == 1.0);
}

TEST_CASE("verdicts") {
  CHECK(compare_to_bound(1.0, 0.0, 0.6) == Verdict::Pass);
  CHECK(compare_to_bound(0.0, 0.001, 0.6) == Verdict::Fail);
  CHECK(compare_to_bound(0.58, 0.01, 0.6) == Verdict::Pass);
  CHECK(compare_to_bound(0.56, 0.01, 0.6) == Verdict::Fail);
  EnsembleSummary s;
  s.p_hat = 1.0;
  CHECK(compare_blowup_to_bound(s, 0.6) == Verdict::Pass);
}

TEST_CASE("parallel_for rethrows") {
  CHECK_THROWS_AS(parallel_for(8, 2, [](int i) {
                    if (i == 5) throw InvalidParams("boom");
                  }),
                  InvalidParams);
}

}
