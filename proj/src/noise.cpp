#include "smch2/noise.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "smch2/error.hpp"

namespace smch2 {

std::vector<double> BrownianPath::cumulative() const {
  std::vector<double> w(increments.size() + 1, 0.0);
  for (std::size_t i = 0; i < increments.size(); ++i) w[i + 1] = w[i] + increments[i];
  return w;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BrownianPath sample_brownian(std::uint64_t seed, double dt, int n_steps) {
  if (!(dt > 0.0)) throw InvalidParams("dt must be positive");
  if (n_steps < 0) throw InvalidParams("negative step count");
  BrownianPath p{seed, dt, std::vector<double>(n_steps)};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  for (auto& x : p.increments) x = normal(rng);
  return p;
}

std::pair<BrownianPath, BrownianPath> correlated_pair(const BrownianPath& path1, double kappa,
                                                      std::uint64_t seed2) {
  if (!(kappa >= -1.0 && kappa <= 1.0)) throw InvalidKappa("kappa must lie in [-1, 1]");
  const auto perp = sample_brownian(seed2, path1.dt, path1.n_steps());
  const double r = std::sqrt(1.0 - kappa * kappa);
  BrownianPath p2{seed2, path1.dt, std::vector<double>(path1.increments.size())};
  for (std::size_t i = 0; i < p2.increments.size(); ++i)
    p2.increments[i] = kappa * path1.increments[i] + r * perp.increments[i];
  return {path1, std::move(p2)};
}

BrownianPath coarsen(const BrownianPath& path, int factor) {
  if (factor < 1 || path.n_steps() % factor != 0)
    throw InvalidParams("coarsening factor must divide the step count");
  BrownianPath out{path.seed, path.dt * factor, std::vector<double>(path.n_steps() / factor, 0.0)};
  for (int i = 0; i < path.n_steps(); ++i) out.increments[i / factor] += path.increments[i];
  return out;
}

TimeFn constant_fn(double value) {
  return [value](double) { return value; };
}

GeneralHS GeneralHS::with_defaults(int modes) {
  GeneralHS hs;
  hs.mode_coeffs.assign(modes, 1.0);
  hs.sigma.resize(modes);
  for (int k = 0; k < modes; ++k) hs.sigma[k] = std::ldexp(1.0, -(k + 1));
  return hs;
}

double GeneralHS::growth(double S) const {
  double norm2 = 0.0;
  for (std::size_t k = 0; k < sigma.size(); ++k) norm2 += std::pow(sigma[k] * mode_coeffs[k], 2);
  return std::sqrt(norm2) * S / (1.0 + S);
}

NoiseSpec NoiseSpec::none() { return linear(0.0, 0.0, 0.0); }

NoiseSpec NoiseSpec::linear(double b, double b_star, double b_sup) {
  return NoiseSpec{LinearB{constant_fn(b), b_star, b_sup}, 1.0};
}

NoiseSpec NoiseSpec::linear(double b) { return linear(b, b * b, b * b); }

NoiseSpec NoiseSpec::nonlinear(double a, double theta, double a_star, double a_sup) {
  return NoiseSpec{NonlinearTheta{constant_fn(a), theta, a_star, a_sup}, 1.0};
}

NoiseSpec NoiseSpec::general(GeneralHS hs, double kappa) { return NoiseSpec{std::move(hs), kappa}; }

int NoiseSpec::drivers() const {
  if (const auto* hs = std::get_if<GeneralHS>(&model)) return static_cast<int>(hs->sigma.size());
  return 1;
}

void NoiseSpec::validate() const {
  if (!(kappa >= -1.0 && kappa <= 1.0)) throw InvalidKappa("kappa must lie in [-1, 1]");
  if (const auto* lb = std::get_if<LinearB>(&model)) {
    if (!lb->b) throw InvalidParams("b(t) is not set");
    // b_star = 0 admits b = 0, the deterministic limit
    if (!(lb->b_star >= 0.0)) throw InvalidParams("b_star must be non-negative");
    if (lb->b_star > lb->b_sup) throw InvalidParams("b_star exceeds b_sup");
  } else if (const auto* nt = std::get_if<NonlinearTheta>(&model)) {
    if (!nt->a) throw InvalidParams("a(t) is not set");
    if (!(nt->theta > 0.0)) throw InvalidParams("theta must be positive");
    if (!(nt->a_star > 0.0)) throw InvalidParams("a_star must be positive");
    if (nt->a_star > nt->a_sup) throw InvalidParams("a_star exceeds a_sup");
  } else {
    const auto& hs = std::get<GeneralHS>(model);
    if (hs.sigma.empty() || hs.sigma.size() != hs.mode_coeffs.size())
      throw InvalidParams("GeneralHS needs matching sigma and mode_coeffs arrays");
  }
}

std::string NoiseSpec::name() const {
  std::ostringstream os;
  if (const auto* lb = std::get_if<LinearB>(&model))
    os << "LinearB(b_star=" << lb->b_star << ", b_sup=" << lb->b_sup << ")";
  else if (const auto* nt = std::get_if<NonlinearTheta>(&model))
    os << "NonlinearTheta(theta=" << nt->theta << ", a_star=" << nt->a_star
       << ", a_sup=" << nt->a_sup << ")";
  else
    os << "GeneralHS(K=" << drivers() << ", kappa=" << kappa << ")";
  return os.str();
}

namespace {

void check_bound(double sq, double lo, double hi, const char* what) {
  const double tol = 1e-12 * std::max(1.0, hi);
  if (sq < lo - tol || sq > hi + tol) {
    std::ostringstream os;
    os << what << "^2 = " << sq << " outside [" << lo << ", " << hi << "]";
    throw SpecViolation(os.str());
  }
}

}  // namespace

NoiseCoefficient noise_coefficient(const NoiseSpec& spec, double t, double w1inf_sum) {
  NoiseCoefficient out;
  if (const auto* lb = std::get_if<LinearB>(&spec.model)) {
    const double b = lb->b(t);
    check_bound(b * b, lb->b_star, lb->b_sup, "b");
    out.u = {b};
  } else if (const auto* nt = std::get_if<NonlinearTheta>(&spec.model)) {
    const double a = nt->a(t);
    check_bound(a * a, nt->a_star, nt->a_sup, "a");
    out.u = {a * std::pow(1.0 + w1inf_sum, nt->theta)};
  } else {
    const auto& hs = std::get<GeneralHS>(spec.model);
    const double damp = w1inf_sum / (1.0 + w1inf_sum);
    out.u.resize(hs.sigma.size());
    for (std::size_t k = 0; k < hs.sigma.size(); ++k) out.u[k] = hs.sigma[k] * hs.mode_coeffs[k] * damp;
  }
  out.gamma = out.u;
  return out;
}

NoiseCoefficient noise_coefficient(const NoiseSpec& spec, double t, const State& state) {
  if (state.frame != Frame::Physical) throw FrameMismatch("noise coefficient needs a physical state");
  const double S = spec.is_linear() ? 0.0 : w1inf_norm(state.first) + w1inf_norm(state.second);
  return noise_coefficient(spec, t, S);
}

std::pair<std::vector<double>, std::vector<double>> exponential_processes(const BrownianPath& path,
                                                                          const TimeFn& b) {
  const int n = path.n_steps();
  std::vector<double> beta(n + 1), alpha(n + 1);
  double stoch = 0.0, quad = 0.0;
  beta[0] = alpha[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    const double bi = b(i * path.dt);
    stoch += bi * path.increments[i];
    quad += 0.5 * bi * bi * path.dt;
    alpha[i + 1] = std::exp(stoch);
    beta[i + 1] = std::exp(stoch - quad);
  }
  return {std::move(beta), std::move(alpha)};
}

}  // namespace smch2
