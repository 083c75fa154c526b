#include "nlspec/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlspec {
namespace {

bool all_finite(const SpectralField& f) {
  for (const auto& c : f.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

double sup_of(const SpectralField& f) { return sup_norm(inverse_transform(f)); }

}  // namespace

void SolverConfig::validate() const {
  if (!(epsilon >= 0.0)) throw ContractError("solver: epsilon must be nonnegative");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ContractError("solver: t_end must be positive");
  if (record_every < 1) throw ContractError("solver: record_every must be >= 1");
  if (guard_m < 0 || guard_m > kMaxDerivativeOrder)
    throw ContractError("solver: guard m outside [0, " + std::to_string(kMaxDerivativeOrder) + "]");
  if (!(guard_radius > 0.0)) throw ContractError("solver: guard radius K must be positive");
  if (const auto* f = std::get_if<FixedStep>(&dt_policy)) {
    if (!(f->dt > 0.0) || !std::isfinite(f->dt)) throw ContractError("solver: fixed dt must be positive");
  } else {
    const double s = std::get<AutoStep>(dt_policy).safety;
    if (!(s > 0.0 && s <= 1.0)) throw ContractError("solver: auto safety must lie in (0, 1]");
  }
}

RunState make_state(double t, SpectralField rho, double rho_floor, double eps,
                    const ModelData& data, int sobolev_m, const RhsOptions& options) {
  RunState s{t, std::move(rho), rho_floor, {}, std::nullopt};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!all_finite(s.rho)) {
    s.diag = {nan, nan, nan, nan, nan};
    return s;
  }
  const GridField grid_rho = inverse_transform(s.rho);
  s.diag.mass = s.rho.mean();
  s.diag.min_rho = min_value(grid_rho);
  s.diag.max_rho = max_value(grid_rho);
  const double norm = sobolev_norm(s.rho, sobolev_m);
  s.diag.energy = 0.5 * norm * norm;
  s.diag.sup_rhs = nan;
  if (s.diag.min_rho > 0.0) {
    try {
      SpectralField f = rhs_regularized(s.rho, eps, data, options);
      s.diag.sup_rhs = sup_of(f);
      s.rhs = std::move(f);
    } catch (const PositivityError&) {
      // mollified density not positive; the guard decides what happens next
    }
  }
  return s;
}

StiffnessEstimate stiffness(double eps, const ModelData& data) {
  const TorusGrid& grid = data.grid();
  const double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
  double peak = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const WaveVector k = grid.wavevector(i);
    const double k2 = static_cast<double>(k[0] * k[0] + k[1] * k[1]);
    peak = std::max(peak, four_pi_sq * k2 * std::exp(-2.0 * eps * k2));
  }
  const ModelParams& p = data.params();
  return {p.delta() * p.u_plus() * peak, data.sup_omega() + data.sup_gamma()};
}

double stable_dt(double eps, const ModelData& data, double safety, double cap) {
  const StiffnessEstimate s = stiffness(eps, data);
  const double lambda = s.diffusion + s.reaction;
  if (!(lambda > 0.0)) return cap;
  return std::min(cap, safety * kRk4StabilityExtent / lambda);
}

StepResult step_rk4(const RunState& state, double dt, double eps, const ModelData& data,
                    int sobolev_m, const RhsOptions& options) {
  if (!state.rhs) throw StepFailure("step_rk4: right-hand side undefined at step start", state.t);
  const SpectralField& rho = state.rho;
  const SpectralField& k1 = *state.rhs;

  auto stage = [&](const SpectralField& y, double t_stage) {
    try {
      return rhs_regularized(y, eps, data, options);
    } catch (const PositivityError& e) {
      throw StepFailure(std::string("RK4 stage left the positive cone: ") + e.what(), t_stage);
    }
  };

  const double t = state.t;
  const SpectralField k2 = stage(axpy(rho, 0.5 * dt, k1), t + 0.5 * dt);
  const SpectralField k3 = stage(axpy(rho, 0.5 * dt, k2), t + 0.5 * dt);
  const SpectralField k4 = stage(axpy(rho, dt, k3), t + dt);

  std::vector<Complex> next(rho.coeffs());
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < next.size(); ++i)
    next[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  double stage_sup = state.diag.sup_rhs;
  stage_sup = std::max({stage_sup, sup_of(k2), sup_of(k3), sup_of(k4)});

  return {make_state(t + dt, SpectralField(rho.grid(), std::move(next)), state.rho_floor, eps,
                     data, sobolev_m, options),
          stage_sup};
}

std::string to_string(GuardKind kind) {
  switch (kind) {
    case GuardKind::norm_exit: return "norm-exit";
    case GuardKind::positivity_exit: return "positivity-exit";
    case GuardKind::nonfinite: return "nonfinite";
  }
  return "unknown";
}

std::string to_string(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::completed: return "completed";
    case TerminalKind::guard: return "guard";
    case TerminalKind::step_failure: return "step-failure";
  }
  return "unknown";
}

std::optional<GuardKind> guard_check(const RunState& state, const SolverConfig& config) {
  if (!all_finite(state.rho)) return GuardKind::nonfinite;
  const int m = config.sobolev_index(state.rho.grid().dim());
  if (sobolev_norm(state.rho, m) >= config.guard_radius) return GuardKind::norm_exit;
  if (state.diag.min_rho <= 0.5 * state.rho_floor) return GuardKind::positivity_exit;
  return std::nullopt;
}

Trajectory integrate(const Problem& problem) {
  const SolverConfig& cfg = problem.config;
  const ModelData& data = problem.data;
  cfg.validate();
  if (!(problem.rho0.grid() == data.grid()))
    throw ContractError("integrate: initial condition and model data use different grids");

  const double rho_floor = min_value(inverse_transform(problem.rho0));
  if (!(rho_floor > 0.0)) throw ContractError("integrate: initial density must be positive");

  const double eps = cfg.epsilon;
  const int m = cfg.sobolev_index(data.grid().dim());
  double dt = 0.0;
  if (const auto* f = std::get_if<FixedStep>(&cfg.dt_policy))
    dt = std::min(f->dt, cfg.t_end);
  else
    dt = stable_dt(eps, data, std::get<AutoStep>(cfg.dt_policy).safety, cfg.t_end);

  Trajectory traj;
  traj.rho_floor = rho_floor;
  traj.epsilon = eps;
  traj.sobolev_m = m;

  RunState state = make_state(0.0, problem.rho0, rho_floor, eps, data, m, cfg.rhs);
  double k_star = std::isfinite(state.diag.sup_rhs) ? state.diag.sup_rhs : 0.0;
  traj.records.push_back({0.0, 0.0, state.rho, state.diag, k_star});

  if (auto g = guard_check(state, cfg)) {
    traj.status = {TerminalKind::guard, g, 0.0, "initial state outside O_K: " + to_string(*g)};
    return traj;
  }

  // Steps are counted, not accumulated, so the time grid is reproducible.
  const auto full_steps = static_cast<std::size_t>(std::floor(cfg.t_end / dt));
  const double remainder = cfg.t_end - static_cast<double>(full_steps) * dt;
  const bool tail = remainder > 1e-12 * cfg.t_end;
  const std::size_t total_steps = full_steps + (tail ? 1 : 0);

  for (std::size_t step = 1; step <= total_steps; ++step) {
    const double t_next = step == total_steps ? cfg.t_end : static_cast<double>(step) * dt;
    const double h = t_next - state.t;
    std::optional<StepResult> result;
    try {
      result = step_rk4(state, h, eps, data, m, cfg.rhs);
    } catch (const StepFailure& f) {
      traj.status = {TerminalKind::step_failure, std::nullopt, f.stage_time(), f.what()};
      return traj;
    }
    ++traj.steps;
    k_star = std::max(k_star, result->stage_sup);
    state = std::move(result->next);
    state.t = t_next;

    const auto g = guard_check(state, cfg);
    if (g || step % static_cast<std::size_t>(cfg.record_every) == 0 || step == total_steps)
      traj.records.push_back({t_next, h, state.rho, state.diag, k_star});
    if (g) {
      traj.status = {TerminalKind::guard, g, t_next, "left O_K: " + to_string(*g)};
      return traj;
    }
  }
  traj.status = {TerminalKind::completed, std::nullopt, state.t, ""};
  return traj;
}

}  // namespace nlspec
