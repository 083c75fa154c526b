#pragma once

// Scenario builders shared by the unit tests and the acceptance binary.

#include <cmath>
#include <numbers>
#include <random>

#include "nlspec/scenario.hpp"

namespace nlspec::fixtures {

inline ModesSpec modes(double offset, std::vector<ModeTerm> terms) {
  return ModesSpec{offset, std::move(terms)};
}

/// Smooth, generic 1-d scenario: every data field varies in space and the
/// kernel is separable and non-uniform.
inline Scenario generic_1d(int n = 64, double eps = 0.05) {
  Scenario sc;
  sc.dim = 1;
  sc.n = n;
  sc.delta = 0.05;
  sc.u_plus = 0.8;
  sc.u_minus = 0.4;
  sc.rho_tilde = 1.0;
  sc.kappa = modes(0.5, {{{1, 0}, 0.3, 0.0}});
  sc.eta = modes(0.2, {{{2, 0}, 0.1, 1.0}});
  sc.omega = ConstantSpec{0.3};
  sc.gamma = modes(0.5, {{{1, 0}, 0.2, std::numbers::pi / 2}});
  sc.rho0 = modes(1.0, {{{1, 0}, 0.3, 0.0}, {{3, 0}, 0.1, 0.5}});
  sc.kernel = SeparableKernelSpec{modes(1.0, {{{1, 0}, 0.2, 0.0}}),
                                  GaussianBumpSpec{{0.3, 0.0}, 0.15, 1.0, 0.1}};
  sc.solver.epsilon = eps;
  sc.solver.dt_policy = FixedStep{0.005};
  sc.solver.t_end = 0.5;
  sc.solver.guard_radius = 1e7;
  return sc;
}

/// Constant state with eta = omega rho: the right-hand side vanishes.
inline Scenario steady_1d(int n = 32, double eps = 0.05) {
  Scenario sc;
  sc.dim = 1;
  sc.n = n;
  sc.delta = 0.1;
  sc.u_plus = 0.6;
  sc.u_minus = 0.2;
  sc.rho_tilde = 1.0;
  sc.kappa = ConstantSpec{0.5};
  sc.eta = ConstantSpec{0.4};
  sc.omega = ConstantSpec{0.5};
  sc.gamma = ConstantSpec{0.3};
  sc.rho0 = ConstantSpec{0.8};
  sc.kernel = UniformKernelSpec{};
  sc.solver.epsilon = eps;
  sc.solver.dt_policy = AutoStep{0.5};
  sc.solver.t_end = 0.5;
  return sc;
}

/// Random smooth scenario: low-mode data fields with random amplitudes and
/// phases, kept inside the admissible ranges.
inline Scenario random_smooth_1d(std::mt19937_64& rng, int n = 256) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto field = [&](double offset, double spread, int kmax) {
    ModesSpec s{offset, {}};
    for (int k = 1; k <= kmax; ++k)
      s.modes.push_back({{k, 0}, spread * u(rng) / kmax, 2.0 * std::numbers::pi * u(rng)});
    return s;
  };
  Scenario sc;
  sc.dim = 1;
  sc.n = n;
  sc.delta = 0.02 + 0.1 * u(rng);
  sc.u_plus = 0.6 + 0.3 * u(rng);
  sc.u_minus = 0.1 + 0.4 * u(rng);
  sc.rho_tilde = 0.5 + u(rng);
  sc.kappa = field(0.5, 0.4, 3);
  sc.eta = field(0.3, 0.2, 2);
  sc.omega = field(0.3, 0.2, 2);
  sc.gamma = field(0.4, 0.3, 2);
  sc.rho0 = field(1.0, 0.6, 4);
  sc.kernel = SeparableKernelSpec{field(1.0, 0.5, 2), field(1.0, 0.5, 2)};
  return sc;
}

}  // namespace nlspec::fixtures
