#include "smch2/drift.hpp"

#include <algorithm>
#include <cmath>

#include "smch2/error.hpp"

namespace smch2 {

void DriftOptions::validate() const {
  if (use_cutoff && !(R > 1.0)) throw InvalidParams("cut-off radius R must exceed 1");
  if (use_mollified && !(eps > 0.0 && eps <= 1.0))
    throw InvalidEpsilon("mollified drift requires eps in (0, 1]");
}

namespace {

double psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double cutoff_chi(double x, double R) {
  if (!(R > 1.0)) throw InvalidParams("cut-off radius R must exceed 1");
  const double t = x / R;
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double a = psi(2.0 - t);
  return a / (a + psi(t - 1.0));
}

namespace {

Field product(const Field& a, const Field& b, bool dealias_on) {
  Field p = pointwise_product(a, b);
  return dealias_on ? dealias(p) : p;
}

Field maybe_dealias(const Field& f, bool on) { return on ? dealias(f) : f; }

}  // namespace

Field f1(const Field& u, const Field& gamma, bool dealias_on) {
  require_same_grid(u, gamma);
  const Field uu = maybe_dealias(u, dealias_on);
  const Field gg = maybe_dealias(gamma, dealias_on);
  const Field ux = derivative(uu);
  const Field gx = derivative(gg);
  Field inner = product(uu, uu, dealias_on);
  inner += 0.5 * product(ux, ux, dealias_on);
  inner += 0.5 * product(gg, gg, dealias_on);
  inner -= 0.5 * product(gx, gx, dealias_on);
  return helmholtz_inverse(inner, true);
}

Field f2(const Field& u, const Field& gamma, bool dealias_on) {
  require_same_grid(u, gamma);
  const Field uu = maybe_dealias(u, dealias_on);
  const Field gg = maybe_dealias(gamma, dealias_on);
  const Field ux = derivative(uu);
  const Field gx = derivative(gg);
  Field inner = derivative(product(ux, gx, dealias_on));
  inner += product(ux, gg, dealias_on);
  return helmholtz_inverse(inner, false);
}

std::pair<Field, Field> drift(const State& state, const DriftOptions& opts) {
  if (state.frame != Frame::Physical) throw FrameMismatch("drift expects a physical-frame state");
  require_same_grid(state.first, state.second);
  state.first.require_finite("u");
  state.second.require_finite("gamma");
  DriftWorkspace ws(state.first.grid(), opts);
  const auto u_hat = to_spectrum(state.first);
  const auto g_hat = to_spectrum(state.second);
  Spectrum du{u_hat.grid, std::vector<Complex>(u_hat.coeffs.size())};
  Spectrum dg{u_hat.grid, std::vector<Complex>(u_hat.coeffs.size())};
  ws.evaluate(u_hat.coeffs, g_hat.coeffs, du.coeffs, dg.coeffs);
  Field a = to_field(du);
  Field b = to_field(dg);
  a.require_finite("drift u");
  b.require_finite("drift gamma");
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------- workspace

DriftWorkspace::DriftWorkspace(GridPtr grid, DriftOptions opts)
    : grid_(std::move(grid)), opts_(opts) {
  opts_.validate();
  const int m = grid_->spectrum_size();
  const int n = grid_->size();
  auto k = grid_->wavenumbers();
  mult_dx_h_.resize(m);
  mult_h_.resize(m);
  mollifier_.assign(m, 1.0);
  for (int j = 0; j < m; ++j) {
    mult_h_[j] = 1.0 / (1.0 + k[j] * k[j]);
    mult_dx_h_[j] = k[j] * mult_h_[j];
    if (opts_.use_mollified) mollifier_[j] = std::exp(-0.5 * opts_.eps * opts_.eps * k[j] * k[j]);
  }
  mult_dx_h_[m - 1] = 0.0;
  for (auto* v : {&a_hat_, &b_hat_, &tmp_hat_, &p1_, &p2_, &p3_, &p4_, &p5_}) v->resize(m);
  for (auto* v : {&u_, &ux_, &g_, &gx_, &ju_, &jux_, &jgx_, &work_}) v->resize(n);
}

void DriftWorkspace::to_grid(std::span<const Complex> hat, double k_power, std::vector<double>& out) {
  auto k = grid_->wavenumbers();
  const int m = grid_->spectrum_size();
  for (int j = 0; j < m; ++j)
    tmp_hat_[j] = k_power == 0.0 ? hat[j] : hat[j] * Complex(0.0, k[j]);
  if (k_power != 0.0) tmp_hat_[m - 1] = 0.0;
  grid_->inverse(tmp_hat_, out);
}

void DriftWorkspace::to_hat(const std::vector<double>& values, std::vector<Complex>& out) {
  grid_->forward(values, out);
  if (opts_.dealias) {
    const int cut = grid_->dealias_cutoff();
    for (std::size_t j = cut + 1; j < out.size(); ++j) out[j] = 0.0;
  }
}

void DriftWorkspace::evaluate(std::span<const Complex> u_hat, std::span<const Complex> g_hat,
                              std::span<Complex> du_hat, std::span<Complex> dg_hat) {
  const int m = grid_->spectrum_size();
  const int n = grid_->size();
  const int cut = opts_.dealias ? grid_->dealias_cutoff() : m - 1;
  for (int j = 0; j < m; ++j) {
    a_hat_[j] = j <= cut ? u_hat[j] : 0.0;
    b_hat_[j] = j <= cut ? g_hat[j] : 0.0;
  }
  to_grid(a_hat_, 0, u_);
  to_grid(a_hat_, 1, ux_);
  to_grid(b_hat_, 0, g_);
  to_grid(b_hat_, 1, gx_);

  double su = 0, sux = 0, sg = 0, sgx = 0;
  for (int i = 0; i < n; ++i) {
    su = std::max(su, std::abs(u_[i]));
    sux = std::max(sux, std::abs(ux_[i]));
    sg = std::max(sg, std::abs(g_[i]));
    sgx = std::max(sgx, std::abs(gx_[i]));
  }
  last_w1inf_sum_ = std::max(su, sux) + std::max(sg, sgx);
  last_chi_ = opts_.use_cutoff ? cutoff_chi(last_w1inf_sum_, opts_.R) : 1.0;
  if (last_chi_ == 0.0) {
    std::fill(du_hat.begin(), du_hat.end(), Complex(0.0));
    std::fill(dg_hat.begin(), dg_hat.end(), Complex(0.0));
    return;
  }

  // transport terms
  if (opts_.use_mollified) {
    for (int j = 0; j < m; ++j) a_hat_[j] *= mollifier_[j];
    for (int j = 0; j < m; ++j) tmp_hat_[j] = b_hat_[j] * mollifier_[j];
    std::vector<Complex> jb(tmp_hat_);
    to_grid(a_hat_, 0, ju_);
    to_grid(a_hat_, 1, jux_);
    to_grid(jb, 1, jgx_);
    for (int i = 0; i < n; ++i) work_[i] = ju_[i] * jux_[i];
    to_hat(work_, p1_);
    for (int i = 0; i < n; ++i) work_[i] = ju_[i] * jgx_[i];
    to_hat(work_, p3_);
    for (int j = 0; j < m; ++j) {
      p1_[j] *= mollifier_[j];
      p3_[j] *= mollifier_[j];
    }
  } else {
    for (int i = 0; i < n; ++i) work_[i] = u_[i] * ux_[i];
    to_hat(work_, p1_);
    for (int i = 0; i < n; ++i) work_[i] = u_[i] * gx_[i];
    to_hat(work_, p3_);
  }

  // nonlocal terms
  for (int i = 0; i < n; ++i)
    work_[i] = u_[i] * u_[i] + 0.5 * (ux_[i] * ux_[i] + g_[i] * g_[i] - gx_[i] * gx_[i]);
  to_hat(work_, p2_);
  for (int i = 0; i < n; ++i) work_[i] = ux_[i] * gx_[i];
  to_hat(work_, p4_);
  for (int i = 0; i < n; ++i) work_[i] = ux_[i] * g_[i];
  to_hat(work_, p5_);

  auto k = grid_->wavenumbers();
  const double chi = last_chi_;
  for (int j = 0; j < m; ++j) {
    const Complex ik(0.0, j == m - 1 ? 0.0 : k[j]);
    du_hat[j] = -chi * (p1_[j] + Complex(0.0, mult_dx_h_[j]) * p2_[j]);
    dg_hat[j] = -chi * (p3_[j] + mult_h_[j] * (ik * p4_[j] + p5_[j]));
  }
}

}  // namespace smch2
