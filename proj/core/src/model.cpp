#include "nlspec/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "nlspec/errors.hpp"
#include "nlspec/rules.hpp"

namespace nlspec {
namespace {

void fail(std::string_view rule, const std::string& field, const std::string& detail) {
  throw ValidationError(std::string(rule), field, detail);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Throws on the first grid value that breaks `ok`.
template <class Pred>
void check_pointwise(const GridField& f, std::string_view rule, const std::string& name,
                     const std::string& bound, Pred ok) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!ok(f[i]))
      fail(rule, name, "value " + num(f[i]) + " at grid point " + std::to_string(i) +
                           " violates " + bound);
}

void require_positive_grid(const GridField& f, const char* what) {
  const double lo = min_value(f);
  if (!(lo > 0.0))
    throw PositivityError(std::string(what) + ": minimum " + num(lo) + " is not positive", lo);
}

std::vector<double> pointwise_flux(const GridField& rho, const GridField& kappa,
                                   const ModelParams& p) {
  // rho u = u+ rho - kappa M(rho)
  const Saturation M = saturation(p);
  std::vector<double> q(rho.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = p.u_plus() * rho[i] - kappa[i] * M.value(rho[i]);
  return q;
}

}  // namespace

ModelParams::ModelParams(double delta, double u_plus, double u_minus, double rho_tilde)
    : delta_(delta), u_plus_(u_plus), u_minus_(u_minus), rho_tilde_(rho_tilde) {
  if (!(delta > 0.0)) fail(rules::kDeltaPositive, "params.delta", "got " + num(delta));
  if (!(u_minus > 0.0)) fail(rules::kUMinusPositive, "params.u_minus", "got " + num(u_minus));
  if (!(u_minus < u_plus))
    fail(rules::kUMinusBelowUPlus, "params.u_minus",
         num(u_minus) + " is not below u_plus = " + num(u_plus));
  if (!(u_plus < 1.0)) fail(rules::kUPlusBelowOne, "params.u_plus", "got " + num(u_plus));
  if (!(rho_tilde > 0.0))
    fail(rules::kRhoTildePositive, "params.rho_tilde", "got " + num(rho_tilde));
}

Saturation saturation(const ModelParams& p) noexcept { return {p.u_minus(), p.rho_tilde()}; }

double unattractiveness(double kappa, double rho, const ModelParams& p) noexcept {
  return p.u_plus() - kappa * p.u_minus() / (1.0 + rho / p.rho_tilde());
}

GridField unattractiveness(const GridField& kappa, const GridField& rho, const ModelParams& p) {
  if (!(kappa.grid() == rho.grid())) throw ContractError("unattractiveness: grid mismatch");
  std::vector<double> u(rho.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = unattractiveness(kappa[i], rho[i], p);
  return GridField(rho.grid(), std::move(u));
}

// ---------------------------------------------------------------------------
// Transfer kernel

TransferKernel TransferKernel::uniform(const TorusGrid& grid) {
  return TransferKernel(grid, Uniform{}, true);
}

TransferKernel TransferKernel::separable(GridField a, GridField b) {
  if (!(a.grid() == b.grid())) throw ContractError("separable kernel: factor grids differ");
  const TorusGrid grid = a.grid();
  return TransferKernel(grid, Separable{std::move(a), std::move(b)}, false);
}

TransferKernel TransferKernel::dense(const TorusGrid& grid, std::vector<double> values) {
  if (grid.size() > kMaxDensePoints)
    throw ContractError("dense kernel: grid of " + std::to_string(grid.size()) +
                        " points exceeds the dense limit of " + std::to_string(kMaxDensePoints));
  if (values.size() != grid.size() * grid.size())
    throw ContractError("dense kernel: expected " + std::to_string(grid.size() * grid.size()) +
                        " entries, got " + std::to_string(values.size()));
  return TransferKernel(grid, Dense{std::move(values)}, false);
}

std::vector<double> TransferKernel::row_integrals() const {
  const std::size_t N = grid_.size();
  return std::visit(
      [&](const auto& s) -> std::vector<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return std::vector<double>(N, 1.0);
        } else if constexpr (std::is_same_v<T, Separable>) {
          const double bint = integral(s.b);
          std::vector<double> rows(N);
          for (std::size_t y = 0; y < N; ++y) rows[y] = s.a[y] * bint;
          return rows;
        } else {
          std::vector<double> rows(N, 0.0);
          for (std::size_t y = 0; y < N; ++y) {
            double sum = 0.0;
            for (std::size_t x = 0; x < N; ++x) sum += s.values[y * N + x];
            rows[y] = sum / static_cast<double>(N);
          }
          return rows;
        }
      },
      storage_);
}

double TransferKernel::min_value() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, Separable>) {
          return std::min(nlspec::min_value(s.a), nlspec::min_value(s.b));
        } else {
          return *std::min_element(s.values.begin(), s.values.end());
        }
      },
      storage_);
}

double TransferKernel::normalization_defect() const {
  double worst = 0.0;
  for (double r : row_integrals()) worst = std::max(worst, std::abs(r - 1.0));
  return worst;
}

TransferKernel kernel_normalize(const TransferKernel& raw) {
  const double lo = raw.min_value();
  if (!(lo >= 0.0)) fail(rules::kTauNonnegative, "kernel", "minimum entry " + num(lo));
  const std::vector<double> rows = raw.row_integrals();
  for (std::size_t y = 0; y < rows.size(); ++y)
    if (!(rows[y] > 0.0))
      fail(rules::kTauRowsNormalizable, "kernel",
           "row integral at source point " + std::to_string(y) + " is " + num(rows[y]));

  const TorusGrid grid = raw.grid();
  const std::size_t N = grid.size();
  TransferKernel::Storage storage = std::visit(
      [&](const auto& s) -> TransferKernel::Storage {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TransferKernel::Uniform>) {
          return s;
        } else if constexpr (std::is_same_v<T, TransferKernel::Separable>) {
          std::vector<double> a(N);
          for (std::size_t y = 0; y < N; ++y) a[y] = s.a[y] / rows[y];
          return TransferKernel::Separable{GridField(grid, std::move(a)), s.b};
        } else {
          std::vector<double> v(s.values);
          for (std::size_t y = 0; y < N; ++y)
            for (std::size_t x = 0; x < N; ++x) v[y * N + x] /= rows[y];
          return TransferKernel::Dense{std::move(v)};
        }
      },
      raw.storage());

  TransferKernel out(grid, std::move(storage), false);
  const double defect = out.normalization_defect();
  if (!(defect <= kKernelNormalizationTol))
    fail(rules::kTauRowsNormalizable, "kernel",
         "row integrals deviate from 1 by " + num(defect) + " after normalization");
  out.normalized_ = true;
  return out;
}

GridField nonlocal_transfer(const GridField& q, const TransferKernel& tau) {
  if (!tau.normalized()) throw ContractError("nonlocal_transfer: kernel is not normalized");
  if (!(q.grid() == tau.grid())) throw ContractError("nonlocal_transfer: grid mismatch");
  const std::size_t N = q.size();
  const double dy = 1.0 / static_cast<double>(N);
  std::vector<double> out = std::visit(
      [&](const auto& s) -> std::vector<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TransferKernel::Uniform>) {
          return std::vector<double>(N, integral(q));
        } else if constexpr (std::is_same_v<T, TransferKernel::Separable>) {
          double weighted = 0.0;
          for (std::size_t y = 0; y < N; ++y) weighted += s.a[y] * q[y];
          weighted *= dy;
          std::vector<double> v(N);
          for (std::size_t x = 0; x < N; ++x) v[x] = s.b[x] * weighted;
          return v;
        } else {
          std::vector<double> v(N, 0.0);
          for (std::size_t y = 0; y < N; ++y) {
            const double qy = q[y] * dy;
            const double* row = s.values.data() + y * N;
            for (std::size_t x = 0; x < N; ++x) v[x] += row[x] * qy;
          }
          return v;
        }
      },
      tau.storage());
  return GridField(q.grid(), std::move(out));
}

// ---------------------------------------------------------------------------
// Model data

ModelData::ModelData(GridField kappa, GridField eta, GridField omega, GridField gamma,
                     TransferKernel tau, ModelParams params)
    : kappa_(std::move(kappa)),
      eta_(std::move(eta)),
      omega_(std::move(omega)),
      gamma_(std::move(gamma)),
      tau_(std::move(tau)),
      params_(params) {
  const TorusGrid& g = kappa_.grid();
  if (!(eta_.grid() == g && omega_.grid() == g && gamma_.grid() == g && tau_.grid() == g))
    throw ContractError("ModelData: data fields live on different grids");
  check_pointwise(kappa_, rules::kKappaUnitInterval, "kappa", "0 <= kappa <= 1",
                  [](double v) { return v >= 0.0 && v <= 1.0; });
  check_pointwise(eta_, rules::kEtaNonnegative, "eta", "eta >= 0",
                  [](double v) { return v >= 0.0 && std::isfinite(v); });
  check_pointwise(omega_, rules::kOmegaNonnegative, "omega", "omega >= 0",
                  [](double v) { return v >= 0.0 && std::isfinite(v); });
  check_pointwise(gamma_, rules::kGammaNonnegative, "gamma", "gamma >= 0",
                  [](double v) { return v >= 0.0 && std::isfinite(v); });
  const double tau_min = tau_.min_value();
  if (!(tau_min >= 0.0)) fail(rules::kTauNonnegative, "kernel", "minimum entry " + num(tau_min));
  if (!tau_.normalized())
    fail(rules::kTauRowsNormalizable, "kernel", "kernel must be passed through kernel_normalize");
}

// ---------------------------------------------------------------------------
// Right-hand sides

GridField nonlocal_exchange(const GridField& rho, const ModelData& data) {
  const ModelParams& p = data.params();
  std::vector<double> q(rho.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = data.gamma()[i] * rho[i] * unattractiveness(data.kappa()[i], rho[i], p);
  const GridField transported = nonlocal_transfer(GridField(rho.grid(), q), data.tau());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = transported[i] - q[i];
  return GridField(rho.grid(), std::move(q));
}

namespace {

// eta - omega rho + I[gamma rho u] - gamma rho u, transformed.
SpectralField reaction_terms(const GridField& rho, const ModelData& data) {
  const GridField exchange = nonlocal_exchange(rho, data);
  std::vector<double> r(rho.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = data.eta()[i] - data.omega()[i] * rho[i] + exchange[i];
  return forward_transform(GridField(rho.grid(), std::move(r)));
}

void require_grid(const SpectralField& rho, const ModelData& data, const char* op) {
  if (!(rho.grid() == data.grid())) throw ContractError(std::string(op) + ": grid mismatch");
}

SpectralField expanded_laplacian_of_flux(const SpectralField& rho_hat, const GridField& rho,
                                         const ModelData& data) {
  // u+ Lap rho - Lap kappa M - 2 M' grad kappa . grad rho - kappa M' Lap rho - kappa M'' |grad rho|^2
  const TorusGrid& grid = rho.grid();
  const ModelParams& p = data.params();
  const Saturation M = saturation(p);
  const SpectralField kappa_hat = forward_transform(data.kappa());
  const GridField lap_rho = inverse_transform(laplacian(rho_hat));
  const GridField lap_kappa = inverse_transform(laplacian(kappa_hat));

  std::vector<double> grad_dot(grid.size(), 0.0);
  std::vector<double> grad_sq(grid.size(), 0.0);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    MultiIndex e{0, 0};
    e[axis] = 1;
    const GridField dr = inverse_transform(derivative(rho_hat, e));
    const GridField dk = inverse_transform(derivative(kappa_hat, e));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grad_dot[i] += dk[i] * dr[i];
      grad_sq[i] += dr[i] * dr[i];
    }
  }

  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = rho[i];
    const double k = data.kappa()[i];
    out[i] = p.u_plus() * lap_rho[i] - lap_kappa[i] * M.value(r) -
             2.0 * M.d1(r) * grad_dot[i] - k * M.d1(r) * lap_rho[i] - k * M.d2(r) * grad_sq[i];
  }
  return forward_transform(GridField(grid, std::move(out)));
}

}  // namespace

SpectralField diffusion_term(const SpectralField& rho_hat, const ModelData& data, RhsPath path) {
  require_grid(rho_hat, data, "diffusion_term");
  const GridField rho = inverse_transform(rho_hat);
  require_positive_grid(rho, "diffusion_term: density");
  const double delta = data.params().delta();
  if (path == RhsPath::expanded)
    return delta * expanded_laplacian_of_flux(rho_hat, rho, data);
  const SpectralField flux =
      forward_transform(GridField(rho.grid(), pointwise_flux(rho, data.kappa(), data.params())));
  return delta * laplacian(flux);
}

SpectralField rhs_classical(const SpectralField& rho_hat, const ModelData& data,
                            const RhsOptions& options) {
  if (options.path == RhsPath::direct) return rhs_regularized(rho_hat, 0.0, data, options);
  require_grid(rho_hat, data, "rhs_classical");
  const GridField rho = inverse_transform(rho_hat);
  require_positive_grid(rho, "rhs_classical: density");
  SpectralField diffusion =
      data.params().delta() * expanded_laplacian_of_flux(rho_hat, rho, data);
  return diffusion + reaction_terms(rho, data);
}

SpectralField rhs_regularized(const SpectralField& rho_hat, double eps, const ModelData& data,
                              const RhsOptions& options) {
  require_grid(rho_hat, data, "rhs_regularized");
  if (!(eps >= 0.0)) throw ContractError("rhs_regularized: epsilon must be nonnegative");
  const GridField rho = inverse_transform(rho_hat);
  require_positive_grid(rho, "rhs_regularized: density");

  const SpectralField smoothed_hat = mollify(rho_hat, eps);
  const GridField smoothed = eps == 0.0 ? rho : inverse_transform(smoothed_hat);
  if (eps != 0.0) require_positive_grid(smoothed, "rhs_regularized: mollified density");

  SpectralField flux = forward_transform(
      GridField(rho.grid(), pointwise_flux(smoothed, data.kappa(), data.params())));
  if (options.dealias) flux = dealias_two_thirds(flux);
  const SpectralField diffusion = data.params().delta() * mollify(laplacian(flux), eps);
  return diffusion + reaction_terms(rho, data);
}

}  // namespace nlspec
