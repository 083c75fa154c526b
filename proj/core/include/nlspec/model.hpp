#pragma once

// Model data and right-hand sides of
//   rho_t = delta Lap(rho u) + eta - omega rho + I[gamma rho u] - gamma rho u,
//   u     = u+ - kappa u- / (1 + rho / rho_tilde),
//   I[q]  = int tau(y, x) q(y) dy,   int tau(y, x) dx = 1 for every y.

#include <variant>
#include <vector>

#include "nlspec/spectral.hpp"

namespace nlspec {

/// Scalar constants. Construction enforces delta > 0, 0 < u- < u+ < 1 and
/// rho_tilde > 0, throwing ValidationError naming the broken rule.
class ModelParams {
 public:
  ModelParams(double delta, double u_plus, double u_minus, double rho_tilde);

  double delta() const noexcept { return delta_; }
  double u_plus() const noexcept { return u_plus_; }
  double u_minus() const noexcept { return u_minus_; }
  double rho_tilde() const noexcept { return rho_tilde_; }

 private:
  double delta_;
  double u_plus_;
  double u_minus_;
  double rho_tilde_;
};

/// Crowding term M(rho) = u- rho / (1 + rho / rho_tilde), so that
/// rho u = u+ rho - kappa M(rho).
struct Saturation {
  double u_minus;
  double rho_tilde;

  double value(double rho) const noexcept { return u_minus * rho / (1.0 + rho / rho_tilde); }
  double d1(double rho) const noexcept {
    const double s = 1.0 + rho / rho_tilde;
    return u_minus / (s * s);
  }
  double d2(double rho) const noexcept {
    const double s = 1.0 + rho / rho_tilde;
    return -2.0 * u_minus / (rho_tilde * s * s * s);
  }
  double d3(double rho) const noexcept {
    const double s = 1.0 + rho / rho_tilde;
    return 6.0 * u_minus / (rho_tilde * rho_tilde * s * s * s * s);
  }
};

Saturation saturation(const ModelParams& p) noexcept;

double unattractiveness(double kappa, double rho, const ModelParams& p) noexcept;
GridField unattractiveness(const GridField& kappa, const GridField& rho, const ModelParams& p);

/// Transfer kernel tau(y, x). Variants:
///  - uniform:   tau == 1,
///  - separable: tau(y, x) = a(y) b(x),
///  - dense:     row-major (y-major) matrix over grid point pairs.
class TransferKernel {
 public:
  struct Uniform {};
  struct Separable {
    GridField a;  // over the source point y
    GridField b;  // over the target point x
  };
  struct Dense {
    std::vector<double> values;  // values[y * N + x]
  };
  using Storage = std::variant<Uniform, Separable, Dense>;

  /// Largest grid (in points) for which a dense kernel may be stored.
  static constexpr std::size_t kMaxDensePoints = 4096;

  static TransferKernel uniform(const TorusGrid& grid);
  static TransferKernel separable(GridField a, GridField b);
  static TransferKernel dense(const TorusGrid& grid, std::vector<double> values);

  const TorusGrid& grid() const noexcept { return grid_; }
  const Storage& storage() const noexcept { return storage_; }
  /// True once the kernel went through kernel_normalize (uniform kernels start normalized).
  bool normalized() const noexcept { return normalized_; }

  /// Quadrature of tau(y, .) over x for every source point y.
  std::vector<double> row_integrals() const;
  double min_value() const;
  /// Largest |row integral - 1|.
  double normalization_defect() const;

 private:
  TransferKernel(TorusGrid grid, Storage storage, bool normalized)
      : grid_(grid), storage_(std::move(storage)), normalized_(normalized) {}

  friend TransferKernel kernel_normalize(const TransferKernel& raw);

  TorusGrid grid_;
  Storage storage_;
  bool normalized_;
};

/// Divides every source row by its x-quadrature. Requires tau >= 0 and every
/// row integral > 0; failures throw ValidationError.
TransferKernel kernel_normalize(const TransferKernel& raw);

/// Tolerance on |row integral - 1| for a kernel to count as normalized.
inline constexpr double kKernelNormalizationTol = 1e-12;

/// I[q](x) = sum_y tau(y, x) q(y) dy. Throws ContractError on an unnormalized kernel.
GridField nonlocal_transfer(const GridField& q, const TransferKernel& tau);

/// Validated model data. Construction checks 0 <= kappa <= 1, eta, omega,
/// gamma >= 0 pointwise, tau >= 0 and normalized, and a common grid.
class ModelData {
 public:
  ModelData(GridField kappa, GridField eta, GridField omega, GridField gamma, TransferKernel tau,
            ModelParams params);

  const TorusGrid& grid() const noexcept { return kappa_.grid(); }
  const GridField& kappa() const noexcept { return kappa_; }
  const GridField& eta() const noexcept { return eta_; }
  const GridField& omega() const noexcept { return omega_; }
  const GridField& gamma() const noexcept { return gamma_; }
  const TransferKernel& tau() const noexcept { return tau_; }
  const ModelParams& params() const noexcept { return params_; }

  /// Grid sups of the data fields (the realized data bounds).
  double sup_kappa() const { return sup_norm(kappa_); }
  double sup_omega() const { return sup_norm(omega_); }
  double sup_gamma() const { return sup_norm(gamma_); }

 private:
  GridField kappa_;
  GridField eta_;
  GridField omega_;
  GridField gamma_;
  TransferKernel tau_;
  ModelParams params_;
};

/// How Lap(rho u) is evaluated in the classical right-hand side.
enum class RhsPath {
  direct,    // form rho u on the grid, apply the spectral Laplacian
  expanded,  // u+ Lap rho - Lap kappa M - 2 M' grad kappa . grad rho - kappa M' Lap rho - kappa M'' |grad rho|^2
};

struct RhsOptions {
  RhsPath path = RhsPath::direct;
  /// Apply the 2/3-rule mask to the nonlinear diffusion flux before differentiating.
  bool dealias = false;
};

/// Pseudospectral delta Lap(rho u) + eta - omega rho + I[gamma rho u] - gamma rho u.
/// Throws PositivityError unless min rho > 0 on the grid.
SpectralField rhs_classical(const SpectralField& rho, const ModelData& data,
                            const RhsOptions& options = {});

/// Regularized operator
///   delta J[Lap(u+ J rho - kappa M(J rho))] + eta - omega rho + I[gamma rho u] - gamma rho u,
/// with J the mollifier at `eps` and u = u(kappa, rho) un-mollified. eps = 0
/// is the classical direct path. Throws PositivityError unless both rho and
/// J rho are positive on the grid.
SpectralField rhs_regularized(const SpectralField& rho, double eps, const ModelData& data,
                              const RhsOptions& options = {});

/// Diffusion part delta Lap(rho u) alone, by either path (for cross-checks).
SpectralField diffusion_term(const SpectralField& rho, const ModelData& data, RhsPath path);

/// Nonlocal exchange I[gamma rho u] - gamma rho u on the grid.
GridField nonlocal_exchange(const GridField& rho, const ModelData& data);

}  // namespace nlspec
