#ifndef SMCH2_SPECTRAL_FIELD_HPP
#define SMCH2_SPECTRAL_FIELD_HPP

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace smch2 {

using Complex = std::complex<double>;

/// Uniform periodic grid on [-L, L) with an FFTW real-to-complex plan pair.
///
/// Spectral coefficients use the half-spectrum layout of a real transform:
/// index j in [0, n/2] carries wavenumber k_j = pi * j / L, and j = n/2 is the
/// Nyquist mode (equivalently mode -n/2). Forward transforms are normalized by
/// 1/n so that f(x_i) = sum_j fhat_j exp(i k_j (x_i + L)) over all n modes.
///
/// Plans are created once and executed with the new-array interface, so one
/// grid may be shared read-only between threads.
class SpectralGrid {
 public:
  SpectralGrid(int n, double half_length);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int size() const noexcept { return n_; }
  int spectrum_size() const noexcept { return n_ / 2 + 1; }
  double half_length() const noexcept { return half_length_; }
  double period() const noexcept { return 2.0 * half_length_; }
  double dx() const noexcept { return dx_; }
  double point(int i) const noexcept { return -half_length_ + i * dx_; }
  std::vector<double> points() const;

  /// Wavenumbers of the half spectrum, length n/2 + 1.
  std::span<const double> wavenumbers() const noexcept { return k_; }
  /// Integer mode numbers of a full complex FFT in standard order:
  /// 0, 1, ..., n/2 - 1, -n/2, ..., -1.
  std::vector<int> modes() const;
  /// Largest |j| kept by the 2/3 rule.
  int dealias_cutoff() const noexcept { return dealias_cutoff_; }
  /// Multiplicity of half-spectrum entry j in the full spectrum (1 or 2).
  double mode_weight(int j) const noexcept {
    return (j == 0 || j == n_ / 2) ? 1.0 : 2.0;
  }

  void forward(std::span<const double> values, std::span<Complex> coeffs) const;
  /// Does not modify `coeffs`.
  void inverse(std::span<const Complex> coeffs, std::span<double> values) const;

  bool same_as(const SpectralGrid& other) const noexcept {
    return n_ == other.n_ && half_length_ == other.half_length_;
  }

 private:
  int n_;
  double half_length_;
  double dx_;
  int dealias_cutoff_;
  std::vector<double> k_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

/// Throws InvalidGrid unless n is a power of two >= 8 and L > 0.
GridPtr make_grid(int n, double half_length);

/// Real point values on a grid. Finite values are an invariant checked by
/// `require_finite`; arithmetic does not check.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<double> values);

  static Field from_function(GridPtr grid, const std::function<double(double)>& f);
  static Field constant(GridPtr grid, double value);

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool all_finite() const noexcept;
  /// Throws NonFinite naming `what` if any value is NaN or infinite.
  void require_finite(const char* what) const;

  double max_abs() const noexcept;
  double min() const noexcept;
  double max() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, double s);
Field operator*(double s, Field a);
/// Pointwise product (no dealiasing).
Field pointwise_product(const Field& a, const Field& b);
/// a + s * b
Field axpy(const Field& a, double s, const Field& b);

/// Throws GridMismatch if the fields live on different grids.
void require_same_grid(const Field& a, const Field& b);

enum class Frame { Physical, Transformed };

/// (u, gamma) in the physical frame or (v1, v2) = (u, gamma) / beta in the
/// transformed frame.
struct State {
  Field first;
  Field second;
  double t = 0.0;
  Frame frame = Frame::Physical;
};

/// Half-spectrum coefficients of a field.
struct Spectrum {
  GridPtr grid;
  std::vector<Complex> coeffs;
};

Spectrum to_spectrum(const Field& f);
Field to_field(const Spectrum& s);

/// Multiplies every coefficient by m(j, k_j).
void apply_multiplier(Spectrum& s, const std::function<Complex(int, double)>& m);
/// Zeroes modes with |j| above the 2/3-rule cutoff.
void dealias(Spectrum& s);
Field dealias(const Field& f);

/// Spectral derivative; the Nyquist coefficient is zeroed.
Field derivative(const Field& f);

/// (1 - d_xx)^{-1} f, or d_x (1 - d_xx)^{-1} f when `with_dx`.
Field helmholtz_inverse(const Field& f, bool with_dx = false);

/// (1 - d_xx) f.
Field momentum(const Field& f);

/// sqrt(2L * sum over all modes (1 + k^2)^s |fhat|^2); s = 0 gives the L2 norm
/// on (-L, L). Supported s in [-2, 6].
double sobolev_norm(const Field& f, double s);
/// Spectral H^s inner product with the same normalization.
double sobolev_inner(const Field& f, const Field& g, double s);
double sobolev_inner(const Spectrum& f, const Spectrum& g, double s);
/// Discrete L2 inner product dx * sum f_i g_i.
double l2_inner(const Field& f, const Field& g);

/// max(sup |f|, sup |f_x|) with a spectral derivative.
double w1inf_norm(const Field& f);

enum class MollifierKind { Tepsilon, Friedrichs };

/// Tepsilon: multiplier 1/(1 + eps^2 k^2), eps in (0, 1).
/// Friedrichs: Gaussian multiplier exp(-eps^2 k^2 / 2), eps > 0.
Field mollify(const Field& f, double eps, MollifierKind kind);

/// Evaluates the trigonometric interpolant of `s` at an arbitrary x (periodic).
double interpolate(const Spectrum& s, double x);

}  // namespace smch2

#endif
