#include "nlspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft_backend.hpp"
#include "nlspec/errors.hpp"

namespace nlspec {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kImagResidueTol = 1e-10;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* op) {
  if (!(a == b)) throw ContractError(std::string(op) + ": grid mismatch");
}

int squared_norm(const WaveVector& k) { return k[0] * k[0] + k[1] * k[1]; }

// i^p for integer p >= 0.
Complex i_pow(int p) {
  switch (p % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n), size_(0) {
  if (dim != 1 && dim != 2) throw ContractError("TorusGrid: dim must be 1 or 2");
  if (n < 8 || !is_power_of_two(n))
    throw ContractError("TorusGrid: n must be a power of two >= 8, got " + std::to_string(n));
  size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

WaveVector TorusGrid::wavevector(std::size_t flat) const noexcept {
  if (dim_ == 1) return {wavenumber(static_cast<int>(flat)), 0};
  return {wavenumber(static_cast<int>(flat / n_)), wavenumber(static_cast<int>(flat % n_))};
}

std::size_t TorusGrid::flat_index(const WaveVector& k) const {
  auto axis_index = [this](int kk) {
    if (kk < -n_ / 2 || kk >= n_ / 2)
      throw ContractError("wavenumber " + std::to_string(kk) + " outside the grid band");
    return static_cast<std::size_t>(kk < 0 ? kk + n_ : kk);
  };
  if (dim_ == 1) {
    if (k[1] != 0) throw ContractError("flat_index: second component must be 0 for d = 1");
    return axis_index(k[0]);
  }
  return axis_index(k[0]) * static_cast<std::size_t>(n_) + axis_index(k[1]);
}

double TorusGrid::coordinate(std::size_t flat, int axis) const noexcept {
  if (dim_ == 1) return axis == 0 ? static_cast<double>(flat) / n_ : 0.0;
  const std::size_t j = axis == 0 ? flat / n_ : flat % n_;
  return static_cast<double>(j) / n_;
}

GridField::GridField(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ContractError("GridField: " + std::to_string(values_.size()) +
                        " values for a grid of " + std::to_string(grid_.size()) + " points");
}

GridField GridField::constant(const TorusGrid& grid, double value) {
  return GridField(grid, std::vector<double>(grid.size(), value));
}

SpectralField::SpectralField(TorusGrid grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size())
    throw ContractError("SpectralField: " + std::to_string(coeffs_.size()) +
                        " coefficients for a grid of " + std::to_string(grid_.size()) +
                        " modes");
}

SpectralField SpectralField::zeros(const TorusGrid& grid) {
  return SpectralField(grid, std::vector<Complex>(grid.size()));
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  return axpy(a, 1.0, b);
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  return axpy(a, -1.0, b);
}

SpectralField operator*(double s, const SpectralField& a) {
  std::vector<Complex> out(a.coeffs());
  for (auto& c : out) c *= s;
  return SpectralField(a.grid(), std::move(out));
}

SpectralField axpy(const SpectralField& a, double s, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid(), "axpy");
  std::vector<Complex> out(a.coeffs());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * b[i];
  return SpectralField(a.grid(), std::move(out));
}

SpectralField forward_transform(const GridField& f) {
  for (double v : f.values())
    if (!std::isfinite(v)) throw ContractError("forward_transform: non-finite grid value");
  std::vector<Complex> data(f.values().begin(), f.values().end());
  detail::fft_forward(f.grid(), data);
  const double scale = 1.0 / static_cast<double>(f.grid().size());
  for (auto& c : data) c *= scale;
  // The complex FFT of real data is Hermitian only up to rounding. Project
  // onto the Hermitian part exactly: the leftover anti-Hermitian part is
  // invisible to grid-based nonlinear terms and would accumulate undamped.
  const TorusGrid& g = f.grid();
  const std::size_t n = static_cast<std::size_t>(g.n());
  auto mirror = [n](std::size_t j) { return (n - j) % n; };
  std::vector<Complex> sym(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t partner =
        g.dim() == 1 ? mirror(i) : mirror(i / n) * n + mirror(i % n);
    sym[i] = 0.5 * (data[i] + std::conj(data[partner]));
  }
  return SpectralField(g, std::move(sym));
}

GridField inverse_transform(const SpectralField& F) {
  std::vector<Complex> data(F.coeffs());
  detail::fft_backward(F.grid(), data);
  double max_abs = 0.0;
  double max_imag = 0.0;
  for (const auto& z : data) {
    max_abs = std::max(max_abs, std::abs(z));
    max_imag = std::max(max_imag, std::abs(z.imag()));
  }
  if (max_imag > kImagResidueTol * max_abs)
    throw ContractError("inverse_transform: imaginary residue " + std::to_string(max_imag) +
                        " exceeds tolerance; coefficients are not Hermitian");
  std::vector<double> values(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) values[i] = data[i].real();
  return GridField(F.grid(), std::move(values));
}

SpectralField mollify(const SpectralField& F, double eps) {
  if (!(eps >= 0.0)) throw ContractError("mollify: epsilon must be nonnegative");
  if (eps == 0.0) return F;
  const TorusGrid& grid = F.grid();
  std::vector<Complex> out(F.coeffs());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] *= std::exp(-eps * squared_norm(grid.wavevector(i)));
  return SpectralField(grid, std::move(out));
}

SpectralField derivative(const SpectralField& F, const MultiIndex& alpha) {
  const TorusGrid& grid = F.grid();
  if (alpha[0] < 0 || alpha[1] < 0) throw ContractError("derivative: negative order");
  if (grid.dim() == 1 && alpha[1] != 0)
    throw ContractError("derivative: second-axis order on a 1-d grid");
  if (alpha[0] + alpha[1] > kMaxDerivativeOrder)
    throw ContractError("derivative: total order exceeds " + std::to_string(kMaxDerivativeOrder));

  const int total = alpha[0] + alpha[1];
  const Complex phase = i_pow(total);
  const int nyquist = -grid.n() / 2;
  std::vector<Complex> out(F.coeffs());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const WaveVector k = grid.wavevector(i);
    double mag = 1.0;
    bool drop = false;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      if (alpha[axis] == 0) continue;
      if (k[axis] == nyquist && alpha[axis] % 2 == 1) drop = true;
      mag *= std::pow(kTwoPi * k[axis], alpha[axis]);
    }
    out[i] = drop ? Complex{} : out[i] * (phase * mag);
  }
  return SpectralField(grid, std::move(out));
}

SpectralField laplacian(const SpectralField& F) {
  const TorusGrid& grid = F.grid();
  const double c = -kTwoPi * kTwoPi;
  std::vector<Complex> out(F.coeffs());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c * squared_norm(grid.wavevector(i));
  return SpectralField(grid, std::move(out));
}

SpectralField dealias_two_thirds(const SpectralField& F) {
  const TorusGrid& grid = F.grid();
  const int cutoff = grid.n() / 3;
  std::vector<Complex> out(F.coeffs());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const WaveVector k = grid.wavevector(i);
    if (std::abs(k[0]) > cutoff || std::abs(k[1]) > cutoff) out[i] = Complex{};
  }
  return SpectralField(grid, std::move(out));
}

SpectralField resample(const SpectralField& F, int n_new) {
  const TorusGrid& from = F.grid();
  const TorusGrid to(from.dim(), n_new);
  if (n_new == from.n()) return F;
  std::vector<Complex> out(to.size());

  if (n_new > from.n()) {
    const int nyq = -from.n() / 2;
    for (std::size_t i = 0; i < F.size(); ++i) {
      const WaveVector k = from.wavevector(i);
      // Each axis sitting on the coarse Nyquist index splits into +-n/2 halves.
      std::vector<std::pair<WaveVector, double>> targets{{k, 1.0}};
      for (int axis = 0; axis < from.dim(); ++axis) {
        if (k[axis] != nyq) continue;
        std::vector<std::pair<WaveVector, double>> split;
        for (auto [kk, w] : targets) {
          WaveVector mirrored = kk;
          mirrored[axis] = -nyq;
          split.push_back({kk, 0.5 * w});
          split.push_back({mirrored, 0.5 * w});
        }
        targets = std::move(split);
      }
      for (const auto& [kk, w] : targets) out[to.flat_index(kk)] += w * F[i];
    }
  } else {
    const int half = n_new / 2;
    for (std::size_t i = 0; i < F.size(); ++i) {
      WaveVector k = from.wavevector(i);
      bool keep = true;
      for (int axis = 0; axis < from.dim(); ++axis) {
        if (std::abs(k[axis]) > half) keep = false;
        else if (k[axis] == half) k[axis] = -half;
      }
      if (keep) out[to.flat_index(k)] += F[i];
    }
  }
  return SpectralField(to, std::move(out));
}

double sobolev_weight(int dim, const WaveVector& k, int m) {
  if (m < 0) throw ContractError("sobolev_weight: m must be nonnegative");
  const double a = kTwoPi * kTwoPi * k[0] * k[0];
  if (dim == 1) {
    double sum = 0.0, term = 1.0;
    for (int j = 0; j <= m; ++j, term *= a) sum += term;
    return sum;
  }
  const double b = kTwoPi * kTwoPi * k[1] * k[1];
  // sum_{i + j <= m} a^i b^j
  double sum = 0.0, ai = 1.0;
  for (int i = 0; i <= m; ++i, ai *= a) {
    double inner = 0.0, bj = 1.0;
    for (int j = 0; j <= m - i; ++j, bj *= b) inner += bj;
    sum += ai * inner;
  }
  return sum;
}

double sobolev_inner(const SpectralField& f, const SpectralField& g, int m) {
  require_same_grid(f.grid(), g.grid(), "sobolev_inner");
  if (m < 0 || m > kMaxDerivativeOrder)
    throw ContractError("sobolev_inner: m outside [0, " + std::to_string(kMaxDerivativeOrder) + "]");
  const TorusGrid& grid = f.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = m == 0 ? 1.0 : sobolev_weight(grid.dim(), grid.wavevector(i), m);
    sum += w * (f[i] * std::conj(g[i])).real();
  }
  return sum;
}

double sobolev_norm(const SpectralField& f, int m) {
  return std::sqrt(std::max(0.0, sobolev_inner(f, f, m)));
}

double fourier_weight_norm(const SpectralField& f, int m) {
  if (m < 0) throw ContractError("fourier_weight_norm: m must be nonnegative");
  const TorusGrid& grid = f.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    sum += std::pow(1.0 + squared_norm(grid.wavevector(i)), m) * std::norm(f[i]);
  return std::sqrt(sum);
}

double integral(const GridField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum / static_cast<double>(f.size());
}

double l2_norm(const GridField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v * v;
  return std::sqrt(sum / static_cast<double>(f.size()));
}

double sup_norm(std::span<const double> values) {
  if (values.empty()) throw ContractError("sup_norm: empty field");
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

double min_value(std::span<const double> values) {
  if (values.empty()) throw ContractError("min_value: empty field");
  return *std::min_element(values.begin(), values.end());
}

double max_value(std::span<const double> values) {
  if (values.empty()) throw ContractError("max_value: empty field");
  return *std::max_element(values.begin(), values.end());
}

double sup_norm(const GridField& f) { return sup_norm(std::span<const double>(f.values())); }
double min_value(const GridField& f) { return min_value(std::span<const double>(f.values())); }
double max_value(const GridField& f) { return max_value(std::span<const double>(f.values())); }

}  // namespace nlspec
