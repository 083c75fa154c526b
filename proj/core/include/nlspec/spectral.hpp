#pragma once

// Discrete Fourier analysis on the unit torus [0,1)^d, d in {1, 2}.
//
// Coefficients follow the integer-lattice convention
//   f(x) = sum_k fhat(k) exp(2 pi i k.x),   fhat(k) = int f(x) exp(-2 pi i k.x) dx,
// with k in {-n/2, ..., n/2-1}^d stored in FFT order (index j holds k = j for
// j < n/2 and k = j - n otherwise). For d = 2 the first axis is the slow one.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlspec {

using Complex = std::complex<double>;

/// Integer wavevector; unused trailing components are zero.
using WaveVector = std::array<int, 2>;

/// Per-axis derivative orders; unused trailing components must be zero.
using MultiIndex = std::array<int, 2>;

/// Highest total derivative order (and Sobolev index) the multiplier tables support.
inline constexpr int kMaxDerivativeOrder = 12;

class TorusGrid {
 public:
  /// Throws ContractError unless dim is 1 or 2 and n >= 8 is a power of two.
  TorusGrid(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return 1.0 / n_; }

  /// Signed wavenumber stored at FFT index j along one axis.
  int wavenumber(int j) const noexcept { return j < n_ / 2 ? j : j - n_; }
  WaveVector wavevector(std::size_t flat) const noexcept;
  /// Flat storage index of wavevector k; components must lie in [-n/2, n/2).
  std::size_t flat_index(const WaveVector& k) const;
  /// Grid coordinate x_axis of point `flat`.
  double coordinate(std::size_t flat, int axis) const noexcept;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int dim_;
  int n_;
  std::size_t size_;
};

/// Real point values on a TorusGrid.
class GridField {
 public:
  GridField(TorusGrid grid, std::vector<double> values);
  static GridField constant(const TorusGrid& grid, double value);

  const TorusGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Fourier coefficients of a field on a TorusGrid.
class SpectralField {
 public:
  SpectralField(TorusGrid grid, std::vector<Complex> coeffs);
  static SpectralField zeros(const TorusGrid& grid);

  const TorusGrid& grid() const noexcept { return grid_; }
  const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  const Complex& operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  const Complex& at(const WaveVector& k) const { return coeffs_[grid_.flat_index(k)]; }
  /// Coefficient of k = 0, i.e. the mean of the represented field.
  double mean() const noexcept { return coeffs_[0].real(); }

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double s, const SpectralField& a);
/// Returns a + s * b.
SpectralField axpy(const SpectralField& a, double s, const SpectralField& b);

/// Quadrature transform; exact for fields band-limited below the Nyquist index.
SpectralField forward_transform(const GridField& f);

/// Synthesis. Imaginary residue up to 1e-10 of the largest value is dropped;
/// anything larger means the coefficients were not Hermitian and throws.
GridField inverse_transform(const SpectralField& F);

/// Heat-kernel mollifier: multiplies mode k by exp(-eps |k|^2).
SpectralField mollify(const SpectralField& F, double eps);

/// Multiplies mode k by (2 pi i k)^alpha. For odd orders the unpaired
/// k = -n/2 mode is zeroed so real fields stay real.
SpectralField derivative(const SpectralField& F, const MultiIndex& alpha);

/// Multiplies mode k by -4 pi^2 |k|^2.
SpectralField laplacian(const SpectralField& F);

/// Zeroes every mode with some |k_i| > n/3.
SpectralField dealias_two_thirds(const SpectralField& F);

/// Zero-pads or truncates to an n_new grid of the same dimension. The
/// unpaired Nyquist mode is split (padding) or folded (truncation)
/// symmetrically so real fields stay real.
SpectralField resample(const SpectralField& F, int n_new);

/// sum_{|alpha| <= m} prod_i (2 pi k_i)^(2 alpha_i): the Parseval weight of
/// the derivative-sum H^m inner product.
double sobolev_weight(int dim, const WaveVector& k, int m);

/// (f, g)_{H^m} = sum_{|alpha|<=m} int d^alpha f d^alpha g, via Parseval.
double sobolev_inner(const SpectralField& f, const SpectralField& g, int m);
double sobolev_norm(const SpectralField& f, int m);

/// Equivalent diagnostic norm sqrt(sum_k (1 + |k|^2)^m |fhat(k)|^2).
double fourier_weight_norm(const SpectralField& f, int m);

/// Rectangle-rule integral over the unit torus (the grid mean).
double integral(const GridField& f);
double l2_norm(const GridField& f);
double sup_norm(const GridField& f);
double min_value(const GridField& f);
double max_value(const GridField& f);

/// Raw-sample variants; throw ContractError on an empty range.
double sup_norm(std::span<const double> values);
double min_value(std::span<const double> values);
double max_value(std::span<const double> values);

}  // namespace nlspec
