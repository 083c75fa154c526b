#include "nlspec/mollifier_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlspec/errors.hpp"

namespace nlspec {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Mode {
  double k0, k1;
  Complex c;
};

std::vector<Mode> nonzero_modes(const SpectralField& f) {
  std::vector<Mode> modes;
  const TorusGrid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(f[i]) == 0.0) continue;
    const WaveVector k = g.wavevector(i);
    modes.push_back({static_cast<double>(k[0]), static_cast<double>(k[1]), f[i]});
  }
  return modes;
}

// Value, gradient and Hessian of the trigonometric polynomial at x.
struct Jet {
  double v = 0;
  double g[2] = {0, 0};
  double h[2][2] = {{0, 0}, {0, 0}};
};

Jet evaluate(const std::vector<Mode>& modes, double x0, double x1) {
  Jet j;
  for (const Mode& m : modes) {
    const double phase = kTwoPi * (m.k0 * x0 + m.k1 * x1);
    const Complex e = m.c * Complex(std::cos(phase), std::sin(phase));
    const double kk[2] = {kTwoPi * m.k0, kTwoPi * m.k1};
    j.v += e.real();
    for (int a = 0; a < 2; ++a) {
      j.g[a] += -kk[a] * e.imag();  // d/dx Re(c e^{i k x}) = Re(i k c e) = -k Im(c e)
      for (int b = 0; b < 2; ++b) j.h[a][b] += -kk[a] * kk[b] * e.real();
    }
  }
  return j;
}

// Newton iteration on grad f = 0 starting at x; returns |f| at the polished point.
double polish(const std::vector<Mode>& modes, int dim, double x0, double x1) {
  for (int it = 0; it < 50; ++it) {
    const Jet j = evaluate(modes, x0, x1);
    double d0, d1 = 0.0;
    if (dim == 1) {
      if (j.h[0][0] == 0.0) break;
      d0 = j.g[0] / j.h[0][0];
    } else {
      const double det = j.h[0][0] * j.h[1][1] - j.h[0][1] * j.h[1][0];
      if (det == 0.0) break;
      d0 = (j.h[1][1] * j.g[0] - j.h[0][1] * j.g[1]) / det;
      d1 = (-j.h[1][0] * j.g[0] + j.h[0][0] * j.g[1]) / det;
    }
    x0 -= d0;
    x1 -= d1;
    if (std::abs(d0) + std::abs(d1) < 1e-15) break;
  }
  return std::abs(evaluate(modes, x0, x1).v);
}

int max_band(const SpectralField& f) {
  int kmax = 0;
  const TorusGrid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(f[i]) == 0.0) continue;
    const WaveVector k = g.wavevector(i);
    kmax = std::max({kmax, std::abs(k[0]), std::abs(k[1])});
  }
  return kmax;
}

int next_pow2(int v) {
  int p = 8;
  while (p < v) p *= 2;
  return p;
}

LemmaCheck make_check(std::string item, std::string description, double worst, double tol) {
  return {std::move(item), std::move(description), worst, tol, worst <= tol};
}

SpectralField sub(const SpectralField& a, const SpectralField& b) { return a - b; }

double max_abs_coeff(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

SpectralField random_band_limited(const TorusGrid& grid, double max_k2, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> c(grid.size());
  c[0] = normal(rng);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const WaveVector k = grid.wavevector(i);
    const int k2 = k[0] * k[0] + k[1] * k[1];
    if (k2 == 0 || k2 > max_k2) continue;
    const bool upper_half = k[0] > 0 || (k[0] == 0 && k[1] > 0);
    if (!upper_half) continue;
    const double re = normal(rng);
    const double im = normal(rng);
    c[i] = Complex(re, im);
    c[grid.flat_index({-k[0], -k[1]})] = Complex(re, -im);
  }
  return SpectralField(grid, std::move(c));
}

double continuous_sup_abs(const SpectralField& f) {
  const TorusGrid& g = f.grid();
  const int kmax = max_band(f);
  if (2 * kmax >= g.n()) throw ContractError("continuous_sup_abs: field is not band-limited");
  const int dim = g.dim();
  const int ns = next_pow2(dim == 1 ? 64 * (kmax + 1) : 16 * (kmax + 1));
  const GridField dense = inverse_transform(resample(f, ns));
  const std::vector<Mode> modes = nonzero_modes(f);

  const double grid_sup = sup_norm(dense);
  double best = grid_sup;
  const double h = 1.0 / ns;
  auto at = [&](int i, int j) {
    i = (i + ns) % ns;
    j = (j + ns) % ns;
    return std::abs(dense[dim == 1 ? static_cast<std::size_t>(i)
                                   : static_cast<std::size_t>(i) * ns + j]);
  };
  // Polish every sampled local max of |f| that could beat the sampled sup.
  const double gate = grid_sup * (1.0 - 1e-2);
  if (dim == 1) {
    for (int i = 0; i < ns; ++i) {
      const double v = at(i, 0);
      if (v >= gate && v >= at(i - 1, 0) && v >= at(i + 1, 0))
        best = std::max(best, polish(modes, 1, i * h, 0.0));
    }
  } else {
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < ns; ++j) {
        const double v = at(i, j);
        if (v < gate) continue;
        bool peak = true;
        for (int di = -1; di <= 1 && peak; ++di)
          for (int dj = -1; dj <= 1; ++dj)
            if ((di || dj) && at(i + di, j + dj) > v) {
              peak = false;
              break;
            }
        if (peak) best = std::max(best, polish(modes, 2, i * h, j * h));
      }
  }
  return best;
}

double mollifier_suite_band(int dim) {
  return 4.0 * std::numbers::pi * std::numbers::pi / dim;
}

bool MollifierSuiteReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.passed; });
}

MollifierSuiteReport mollifier_lemma_suite(const MollifierSuiteConfig& cfg) {
  const TorusGrid grid(cfg.dim, cfg.n);
  if (!(2 * cfg.m > cfg.dim)) throw ContractError("mollifier suite: m must exceed d/2");
  if (cfg.nu < 0 || cfg.m + cfg.nu > kMaxDerivativeOrder)
    throw ContractError("mollifier suite: need 0 <= nu and m + nu <= " +
                        std::to_string(kMaxDerivativeOrder));
  if (cfg.seeds < 1) throw ContractError("mollifier suite: seeds must be >= 1");

  MollifierSuiteReport report;
  report.config = cfg;
  report.band_k2 = mollifier_suite_band(cfg.dim);
  std::mt19937_64 rng(cfg.seed);

  const std::vector<double> contraction_eps = {1.0, 0.5, 0.25, 0.1, 0.01, 1e-3};
  std::vector<double> rate_eps;
  for (int p = 0; p <= 10; ++p) rate_eps.push_back(std::ldexp(1.0, -p));
  std::vector<double> gain_eps;
  for (int p = 1; p <= 10; ++p) gain_eps.push_back(std::ldexp(1.0, -p));
  std::vector<MultiIndex> alphas = {{1, 0}, {2, 0}, {3, 0}, {4, 0}};
  if (cfg.dim == 2) alphas.insert(alphas.end(), {{0, 1}, {1, 1}, {2, 1}, {2, 2}});

  double worst_contraction = -std::numeric_limits<double>::infinity();
  double worst_uniform = -std::numeric_limits<double>::infinity();
  double worst_commute = 0.0;
  double worst_adjoint = 0.0;
  double worst_rate = 0.0;
  double worst_limit = 0.0;
  double worst_gain = 0.0;
  double worst_literal = 0.0;

  for (int s = 0; s < cfg.seeds; ++s) {
    const SpectralField f = random_band_limited(grid, report.band_k2, rng);
    const SpectralField w = random_band_limited(grid, report.band_k2, rng);

    // 1: sup |J f| - sup |f| <= 0, and uniform convergence through the bound
    // sup |J f - f| <= eps * sum |k|^2 |fhat|  (from 1 - exp(-x) <= x).
    const double sup_f = continuous_sup_abs(f);
    double k2_l1 = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const WaveVector k = grid.wavevector(i);
      k2_l1 += (k[0] * k[0] + k[1] * k[1]) * std::abs(f[i]);
    }
    for (double eps : contraction_eps) {
      const SpectralField jf = mollify(f, eps);
      worst_contraction = std::max(worst_contraction, continuous_sup_abs(jf) - sup_f);
      const double dev = continuous_sup_abs(sub(jf, f));
      worst_uniform = std::max(worst_uniform, (dev - eps * k2_l1) / sup_f);
    }

    // 2: derivative and mollifier commute.
    for (double eps : {0.5, 0.05, 0.005}) {
      for (const MultiIndex& a : alphas) {
        const SpectralField lhs = derivative(mollify(f, eps), a);
        const SpectralField rhs = mollify(derivative(f, a), eps);
        const double scale = std::max(max_abs_coeff(lhs), 1e-300);
        worst_commute = std::max(worst_commute, max_abs_coeff(sub(lhs, rhs)) / scale);
      }
    }

    // 3: int (J f) w = int (J w) f by grid quadrature.
    const GridField fg = inverse_transform(f);
    const GridField wg = inverse_transform(w);
    for (double eps : {0.5, 0.05, 0.005}) {
      const GridField jf = inverse_transform(mollify(f, eps));
      const GridField jw = inverse_transform(mollify(w, eps));
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        a += jf[i] * wg[i];
        b += jw[i] * fg[i];
      }
      a /= static_cast<double>(grid.size());
      b /= static_cast<double>(grid.size());
      worst_adjoint = std::max(worst_adjoint, std::abs(a - b) / (l2_norm(fg) * l2_norm(wg)));
    }

    // 4: ||J f - f||_{H^{m-1}} <= eps ||f||_{H^m}; ||J f - f||_{H^m} -> 0.
    const double f_m = sobolev_norm(f, cfg.m);
    double prev_limit = std::numeric_limits<double>::infinity();
    for (double eps : rate_eps) {
      const SpectralField d = sub(mollify(f, eps), f);
      worst_rate = std::max(worst_rate, sobolev_norm(d, cfg.m - 1) / (eps * f_m));
      const double lim = sobolev_norm(d, cfg.m);
      worst_limit = std::max(worst_limit, (lim - prev_limit) / f_m);
      prev_limit = lim;
    }
    // 1 - exp(-eps k^2) <= eps k^2 bounds the last rung.
    worst_limit = std::max(worst_limit, prev_limit / f_m - rate_eps.back() * report.band_k2);

    // 5: eps^nu ||J f||_{H^{m+nu}} / ||f||_{H^m} bounded over the ladder.
    double qmax = 0.0, qmin = std::numeric_limits<double>::infinity();
    for (double eps : gain_eps) {
      const double q = std::pow(eps, cfg.nu) * sobolev_norm(mollify(f, eps), cfg.m + cfg.nu);
      qmax = std::max(qmax, q);
      qmin = std::min(qmin, q);
    }
    worst_gain = std::max(worst_gain, qmax / f_m);
    worst_literal = std::max(worst_literal, qmax / qmin);
  }

  report.checks.push_back(make_check("1-contraction",
                                     "sup|J f| - sup|f| over the continuous torus", worst_contraction,
                                     1e-12));
  report.checks.push_back(make_check(
      "1-uniform", "(sup|J f - f| - eps sum|k|^2|fhat|) / sup|f|",
      worst_uniform, 1e-12));
  report.checks.push_back(make_check("2", "max coefficient mismatch of d^a J f vs J d^a f (relative)",
                                     worst_commute, 1e-12));
  report.checks.push_back(
      make_check("3", "|int (J f) w - int (J w) f| / (||f|| ||w||)", worst_adjoint, 1e-12));
  report.checks.push_back(make_check("4-rate", "max ||J f - f||_{H^{m-1}} / (eps ||f||_{H^m})",
                                     worst_rate, 1.0 + 1e-10));
  report.checks.push_back(make_check(
      "4-limit", "||J f - f||_{H^m} non-increasing as eps -> 0 (growth / ||f||_{H^m})", worst_limit,
      1e-12));
  report.checks.push_back(make_check(
      "5", "max over eps of eps^nu ||J f||_{H^{m+nu}} / ||f||_{H^m}", worst_gain, 10.0));
  report.item5_max_over_min = worst_literal;
  return report;
}

}  // namespace nlspec
