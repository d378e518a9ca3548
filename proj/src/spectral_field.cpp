#include "smch2/spectral_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "smch2/error.hpp"

namespace smch2 {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

SpectralGrid::SpectralGrid(int n, double half_length)
    : n_(n), half_length_(half_length), dx_(2.0 * half_length / n) {
  if (n < 8 || !is_power_of_two(n))
    throw InvalidGrid("grid size must be a power of two >= 8, got " + std::to_string(n));
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw InvalidGrid("half length must be positive");
  dealias_cutoff_ = (n - 1) / 3;
  k_.resize(n / 2 + 1);
  for (int j = 0; j <= n / 2; ++j) k_[j] = std::numbers::pi * j / half_length;

  std::vector<double> in(n);
  std::vector<Complex> out(n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c_1d(
      n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_plan_ = fftw_plan_dft_c2r_1d(
      n, reinterpret_cast<fftw_complex*>(out.data()), in.data(),
      FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
}

SpectralGrid::~SpectralGrid() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::vector<double> SpectralGrid::points() const {
  std::vector<double> x(n_);
  for (int i = 0; i < n_; ++i) x[i] = point(i);
  return x;
}

std::vector<int> SpectralGrid::modes() const {
  std::vector<int> m(n_);
  for (int j = 0; j < n_; ++j) m[j] = j < n_ / 2 ? j : j - n_;
  return m;
}

void SpectralGrid::forward(std::span<const double> values, std::span<Complex> coeffs) const {
  // r2c does not modify its input
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_),
                       const_cast<double*>(values.data()),
                       reinterpret_cast<fftw_complex*>(coeffs.data()));
  const double scale = 1.0 / n_;
  for (auto& c : coeffs) c *= scale;
}

void SpectralGrid::inverse(std::span<const Complex> coeffs, std::span<double> values) const {
  thread_local std::vector<Complex> scratch;
  scratch.assign(coeffs.begin(), coeffs.end());
  // the imaginary parts of the self-conjugate modes carry no information
  scratch.front().imag(0.0);
  scratch.back().imag(0.0);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), values.data());
}

GridPtr make_grid(int n, double half_length) {
  return std::make_shared<const SpectralGrid>(n, half_length);
}

// ---------------------------------------------------------------- Field

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidGrid("null grid");
  values_.assign(grid_->size(), 0.0);
}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidGrid("null grid");
  if (static_cast<int>(values_.size()) != grid_->size())
    throw GridMismatch("value count does not match grid size");
}

Field Field::from_function(GridPtr grid, const std::function<double(double)>& f) {
  Field out(std::move(grid));
  for (int i = 0; i < out.grid_->size(); ++i) out.values_[i] = f(out.grid_->point(i));
  return out;
}

Field Field::constant(GridPtr grid, double value) {
  Field out(std::move(grid));
  std::fill(out.values_.begin(), out.values_.end(), value);
  return out;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void Field::require_finite(const char* what) const {
  if (!all_finite()) throw NonFinite(std::string("non-finite values in ") + what);
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, double s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }

Field pointwise_product(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out = a;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= b[i];
  return out;
}

Field axpy(const Field& a, double s, const Field& b) {
  require_same_grid(a, b);
  Field out = a;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * b[i];
  return out;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!a.grid() || !b.grid()) throw GridMismatch("field without grid");
  if (a.grid() != b.grid() && !a.grid()->same_as(*b.grid()))
    throw GridMismatch("fields live on different grids");
}

// ---------------------------------------------------------------- spectral ops

Spectrum to_spectrum(const Field& f) {
  Spectrum s{f.grid(), std::vector<Complex>(f.grid()->spectrum_size())};
  f.grid()->forward(f.values(), s.coeffs);
  return s;
}

Field to_field(const Spectrum& s) {
  Field out(s.grid);
  s.grid->inverse(s.coeffs, out.values());
  return out;
}

void apply_multiplier(Spectrum& s, const std::function<Complex(int, double)>& m) {
  auto k = s.grid->wavenumbers();
  for (std::size_t j = 0; j < s.coeffs.size(); ++j) s.coeffs[j] *= m(static_cast<int>(j), k[j]);
}

void dealias(Spectrum& s) {
  const std::size_t cut = s.grid->dealias_cutoff();
  for (std::size_t j = cut + 1; j < s.coeffs.size(); ++j) s.coeffs[j] = 0.0;
}

Field dealias(const Field& f) {
  auto s = to_spectrum(f);
  dealias(s);
  return to_field(s);
}

Field derivative(const Field& f) {
  auto s = to_spectrum(f);
  auto k = f.grid()->wavenumbers();
  for (std::size_t j = 0; j < s.coeffs.size(); ++j) s.coeffs[j] *= Complex(0.0, k[j]);
  s.coeffs.back() = 0.0;
  return to_field(s);
}

Field helmholtz_inverse(const Field& f, bool with_dx) {
  auto s = to_spectrum(f);
  auto k = f.grid()->wavenumbers();
  for (std::size_t j = 0; j < s.coeffs.size(); ++j) {
    const double h = 1.0 / (1.0 + k[j] * k[j]);
    s.coeffs[j] *= with_dx ? Complex(0.0, k[j] * h) : Complex(h, 0.0);
  }
  if (with_dx) s.coeffs.back() = 0.0;
  return to_field(s);
}

Field momentum(const Field& f) {
  auto s = to_spectrum(f);
  auto k = f.grid()->wavenumbers();
  for (std::size_t j = 0; j < s.coeffs.size(); ++j) s.coeffs[j] *= 1.0 + k[j] * k[j];
  return to_field(s);
}

double sobolev_inner(const Spectrum& f, const Spectrum& g, double s) {
  if (f.grid != g.grid && !f.grid->same_as(*g.grid)) throw GridMismatch("sobolev_inner");
  const auto& grid = *f.grid;
  auto k = grid.wavenumbers();
  double sum = 0.0;
  for (std::size_t j = 0; j < f.coeffs.size(); ++j) {
    const double w = grid.mode_weight(static_cast<int>(j)) * std::pow(1.0 + k[j] * k[j], s);
    sum += w * std::real(f.coeffs[j] * std::conj(g.coeffs[j]));
  }
  return grid.period() * sum;
}

double sobolev_inner(const Field& f, const Field& g, double s) {
  require_same_grid(f, g);
  return sobolev_inner(to_spectrum(f), to_spectrum(g), s);
}

double sobolev_norm(const Field& f, double s) {
  if (s < -2.0 || s > 6.0) throw InvalidParams("sobolev index outside [-2, 6]");
  auto sp = to_spectrum(f);
  return std::sqrt(std::max(0.0, sobolev_inner(sp, sp, s)));
}

double l2_inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
  return f.grid()->dx() * sum;
}

double w1inf_norm(const Field& f) { return std::max(f.max_abs(), derivative(f).max_abs()); }

Field mollify(const Field& f, double eps, MollifierKind kind) {
  if (!std::isfinite(eps) || eps <= 0.0) throw InvalidEpsilon("mollifier width must be positive");
  if (kind == MollifierKind::Tepsilon && eps >= 1.0)
    throw InvalidEpsilon("T_eps requires eps in (0, 1)");
  auto s = to_spectrum(f);
  auto k = f.grid()->wavenumbers();
  const double e2 = eps * eps;
  for (std::size_t j = 0; j < s.coeffs.size(); ++j) {
    const double k2 = k[j] * k[j];
    s.coeffs[j] *= kind == MollifierKind::Tepsilon ? 1.0 / (1.0 + e2 * k2) : std::exp(-0.5 * e2 * k2);
  }
  return to_field(s);
}

double interpolate(const Spectrum& s, double x) {
  const auto& grid = *s.grid;
  const int n = grid.size();
  auto k = grid.wavenumbers();
  const double xi = x + grid.half_length();
  double sum = s.coeffs[0].real();
  // Nyquist term is taken as its real-valued symmetric part cos(k x)
  const Complex step = std::polar(1.0, k[1] * xi);
  Complex e = step;
  for (int j = 1; j < n / 2; ++j) {
    sum += 2.0 * std::real(s.coeffs[j] * e);
    e *= step;
    if ((j & 63) == 0) e = std::polar(1.0, k[j + 1] * xi);
  }
  sum += s.coeffs[n / 2].real() * std::cos(k[n / 2] * xi);
  return sum;
}

}  // namespace smch2
