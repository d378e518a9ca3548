#include "smch2/characteristics.hpp"

#include <cmath>

#include "smch2/error.hpp"

namespace smch2 {

ParticleSet make_particles(std::vector<double> labels) {
  ParticleSet p;
  p.q = labels;
  p.qx.assign(labels.size(), 1.0);
  p.x0 = std::move(labels);
  return p;
}

ParticleSet make_particles(double lo, double hi, int count) {
  if (count < 1) throw InvalidParams("particle count must be positive");
  std::vector<double> x(count);
  for (int i = 0; i < count; ++i) x[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return make_particles(std::move(x));
}

std::pair<double, double> interpolate_with_derivative(const Spectrum& s, double x) {
  const auto& grid = *s.grid;
  const int n = grid.size();
  auto k = grid.wavenumbers();
  const double xi = x + grid.half_length();
  double val = s.coeffs[0].real();
  double der = 0.0;
  const Complex step = std::polar(1.0, k[1] * xi);
  Complex e = step;
  for (int j = 1; j < n / 2; ++j) {
    const Complex ce = s.coeffs[j] * e;
    val += 2.0 * ce.real();
    der -= 2.0 * k[j] * ce.imag();
    e *= step;
    if ((j & 63) == 0) e = std::polar(1.0, k[j + 1] * xi);
  }
  val += s.coeffs[n / 2].real() * std::cos(k[n / 2] * xi);
  return {val, der};
}

void particle_rhs(const Spectrum& v1_hat, double beta, std::span<const double> q,
                  std::span<const double> qx, std::span<double> dq, std::span<double> dqx) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto [v, vx] = interpolate_with_derivative(v1_hat, q[i]);
    dq[i] = beta * v;
    dqx[i] = beta * vx * qx[i];
  }
}

void require_positive_jacobian(const ParticleSet& particles) {
  for (std::size_t i = 0; i < particles.size(); ++i)
    if (!(particles.qx[i] > 0.0))
      throw JacobianCollapse("particle " + std::to_string(i) + " has q_x <= 0");
}

ParticleSet advect(const ParticleSet& particles, const Field& v1, double beta, double dt) {
  require_positive_jacobian(particles);
  const auto hat = to_spectrum(v1);
  const std::size_t m = particles.size();
  std::vector<double> kq[4], kx[4];
  std::vector<double> q(m), qx(m);
  const double w[4] = {0.0, 0.5, 0.5, 1.0};
  for (int s = 0; s < 4; ++s) {
    kq[s].resize(m);
    kx[s].resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = particles.q[i] + (s ? w[s] * dt * kq[s - 1][i] : 0.0);
      qx[i] = particles.qx[i] + (s ? w[s] * dt * kx[s - 1][i] : 0.0);
    }
    particle_rhs(hat, beta, q, qx, kq[s], kx[s]);
  }
  ParticleSet out = particles;
  for (std::size_t i = 0; i < m; ++i) {
    out.q[i] += dt / 6.0 * (kq[0][i] + 2 * kq[1][i] + 2 * kq[2][i] + kq[3][i]);
    out.qx[i] += dt / 6.0 * (kx[0][i] + 2 * kx[1][i] + 2 * kx[2][i] + kx[3][i]);
  }
  out.t += dt;
  require_positive_jacobian(out);
  return out;
}

std::vector<int> sign_signature(const Field& V1, const ParticleSet& particles) {
  const auto hat = to_spectrum(V1);
  std::vector<int> sig(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const double v = interpolate(hat, particles.q[i]);
    sig[i] = std::abs(v) < 1e-10 ? 0 : (v > 0 ? 1 : -1);
  }
  return sig;
}

double cubic_integral(const Field& v1) {
  const Field d = derivative(v1);
  double sum = 0.0;
  for (double x : d.values()) sum += x * x * x;
  return v1.grid()->dx() * sum;
}

double riccati_K(double energy) { return std::sqrt(2.0) / 2.0 * std::sqrt(std::max(energy, 0.0)); }

double RiccatiMonitor::bound(std::size_t i) const {
  const double b = beta[i];
  const double v = value[i];
  if (kind == MonitorKind::SlopeG) return b * K * K - 0.5 * b * v * v;
  const double K2 = K * K;
  return 3.75 * b * K2 * K2 - b / (4.0 * K2) * v * v;
}

double riccati_step_check(const RiccatiMonitor& monitor, double dt) {
  const std::size_t n = monitor.value.size();
  if (n < 2) throw InvalidParams("riccati check needs two samples");
  return (monitor.value[n - 1] - monitor.value[n - 2]) / dt - monitor.bound(n - 2);
}

std::vector<double> riccati_residuals(const RiccatiMonitor& monitor) {
  std::vector<double> r;
  for (std::size_t i = 0; i + 1 < monitor.value.size(); ++i) {
    const double dt = monitor.t[i + 1] - monitor.t[i];
    r.push_back((monitor.value[i + 1] - monitor.value[i]) / dt - monitor.bound(i));
  }
  return r;
}

}  // namespace smch2
