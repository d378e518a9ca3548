#ifndef SMCH2_CHARACTERISTICS_HPP
#define SMCH2_CHARACTERISTICS_HPP

#include <utility>
#include <vector>

#include "smch2/spectral_field.hpp"

namespace smch2 {

/// Lagrangian particles: labels x0, positions q (unwrapped) and Jacobians q_x.
struct ParticleSet {
  std::vector<double> x0;
  std::vector<double> q;
  std::vector<double> qx;
  double t = 0.0;

  std::size_t size() const noexcept { return x0.size(); }
};

ParticleSet make_particles(std::vector<double> labels);
/// `count` labels evenly spaced on [lo, hi].
ParticleSet make_particles(double lo, double hi, int count);

/// Value and x-derivative of the trigonometric interpolant at x.
std::pair<double, double> interpolate_with_derivative(const Spectrum& s, double x);

/// Right-hand side of the particle system for a frozen velocity spectrum:
/// dq = beta v1(q), dqx = beta v1x(q) qx.
void particle_rhs(const Spectrum& v1_hat, double beta, std::span<const double> q,
                  std::span<const double> qx, std::span<double> dq, std::span<double> dqx);

/// One RK4 step with a frozen field. Throws JacobianCollapse if any qx <= 0.
ParticleSet advect(const ParticleSet& particles, const Field& v1, double beta, double dt);

/// Throws JacobianCollapse if any qx <= 0.
void require_positive_jacobian(const ParticleSet& particles);

/// Sign of V1 at each particle, |V1| < 1e-10 mapped to 0.
std::vector<int> sign_signature(const Field& V1, const ParticleSet& particles);

/// dx * sum (d_x v1)^3.
double cubic_integral(const Field& v1);

/// (sqrt 2 / 2) sqrt(E) with E = |u0|_{H1}^2 + |gamma0|_{H1}^2.
double riccati_K(double energy);

enum class MonitorKind { SlopeG, CubicN };

struct RiccatiMonitor {
  MonitorKind kind = MonitorKind::SlopeG;
  double K = 0.0;
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> beta;

  void record(double time, double v, double b) {
    t.push_back(time);
    value.push_back(v);
    beta.push_back(b);
  }
  /// Upper bound of d(value)/dt at sample i.
  double bound(std::size_t i) const;
};

/// (value[last] - value[last-1]) / dt minus the bound at the left sample.
double riccati_step_check(const RiccatiMonitor& monitor, double dt);
/// Residual for every consecutive pair, using the recorded time gaps.
std::vector<double> riccati_residuals(const RiccatiMonitor& monitor);

}  // namespace smch2

#endif
