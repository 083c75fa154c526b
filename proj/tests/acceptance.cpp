// Acceptance harness: one PASS/FAIL line per criterion.
//
//   nlspec_acceptance [--only 1,3] [--known-red 1]
//
// Exit status is 0 iff the set of failing criteria equals the --known-red set
// (empty by default), so a criterion that is documented as unattainable stays
// visibly red without masking regressions elsewhere.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlspec/analysis.hpp"
#include "nlspec/mollifier_suite.hpp"
#include "nlspec/scenario.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace nlspec;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Trajectories produced by the scenario criteria, audited again by 8 and 9.
struct Registered {
  std::string name;
  Trajectory traj;
  std::function<Trajectory()> refined;  // same scenario on the doubled grid
};
std::vector<Registered> g_runs;

Trajectory run_scenario(const Scenario& sc, std::optional<int> n = std::nullopt) {
  return integrate(render_problem(sc, n));
}

void remember(const std::string& name, const Scenario& sc, Trajectory traj) {
  g_runs.push_back({name, std::move(traj), [sc] { return run_scenario(sc, 2 * sc.n); }});
}

// ---- criteria -------------------------------------------------------------

Outcome mollifier_lemmas() {
  const auto start = Clock::now();
  bool items_ok = true;
  bool literal_ok = true;
  std::ostringstream d;
  for (auto [dim, n] : {std::pair{1, 256}, std::pair{2, 64}}) {
    MollifierSuiteConfig cfg;
    cfg.dim = dim;
    cfg.n = n;
    cfg.m = 5;
    cfg.nu = 2;
    cfg.seeds = 100;
    const MollifierSuiteReport r = mollifier_lemma_suite(cfg);
    d << "d=" << dim << ":";
    for (const LemmaCheck& c : r.checks) {
      if (c.item != "5") items_ok = items_ok && c.passed;
      d << fmt(" %s=%.2e%s", c.item.c_str(), c.worst, c.passed ? "" : "!");
    }
    const bool lit = r.item5_max_over_min <= 10.0;
    literal_ok = literal_ok && lit;
    d << fmt(" item5 max/min=%.3e%s; ", r.item5_max_over_min, lit ? "" : "(>10)");
  }
  const double secs = seconds_since(start);
  d << fmt("runtime %.2fs (<30s)", secs);
  return {items_ok && literal_ok && secs < 30.0, d.str()};
}

Outcome envelope_arithmetic() {
  constexpr double tol = 1e-12;
  struct Case {
    const char* what;
    double got;
    double want;
  };
  const std::vector<Case> cases = {
      {"T_E(E0=0.25,C=1)", existence_horizon({0.25, 1.0, 5}), 0.25},
      {"env(E0=0.25,C=1,t=0)", envelope({0.25, 1.0, 5}, 0.0), 0.25},
      {"env(E0=0.25,C=1,t=0.25)", envelope({0.25, 1.0, 5}, 0.25), 1.0},
      {"T_E(E0=4,m=2,C=1)", existence_horizon({4.0, 1.0, 2}), 1.0 / 24.0},
      {"env(E0=4,m=2,C=1,t=0)", envelope({4.0, 1.0, 2}, 0.0), 4.0},
      {"T_E(E0=1,m=4,C=1)", existence_horizon({1.0, 1.0, 4}), 0.2},
  };
  bool ok = true;
  std::ostringstream d;
  for (const Case& c : cases) {
    const double err = std::abs(c.got - c.want);
    ok = ok && err <= tol;
    d << fmt("%s=%.17g (err %.1e) ", c.what, c.got, err);
  }
  return {ok, d.str()};
}

Scenario mass_growth_scenario(int n) {
  Scenario sc = fixtures::generic_1d(n, 0.05);
  sc.eta = ConstantSpec{0.3};
  sc.omega = ConstantSpec{0.0};
  // Spatially uniform data and a small-amplitude start keep E_5 below one,
  // so the energy envelope is informative over the whole run.
  sc.kappa = ConstantSpec{0.5};
  sc.gamma = ConstantSpec{0.4};
  sc.kernel = UniformKernelSpec{};
  sc.rho0 = fixtures::modes(0.6, {{{1, 0}, 3e-5, 0.0}});
  sc.solver.dt_policy = FixedStep{0.01};
  return sc;
}

Outcome mass_balance() {
  const auto start = Clock::now();
  Scenario closed = fixtures::generic_1d(128, 0.05);
  closed.eta = ConstantSpec{0.0};
  closed.omega = ConstantSpec{0.0};
  closed.solver.dt_policy = FixedStep{0.01};
  const Problem p1 = render_problem(closed);
  Trajectory t1 = integrate(p1);
  const MassReport m1 = mass_audit(t1, p1.data);

  const Scenario growth = mass_growth_scenario(128);
  const Problem p2 = render_problem(growth);
  Trajectory t2 = integrate(p2);
  double worst = 0.0;
  const double m0 = t2.records.front().diag.mass;
  for (const Record& r : t2.records) worst = std::max(worst, std::abs(r.diag.mass - m0 - 0.3 * r.t));

  const double secs = seconds_since(start);
  const bool ok = t1.completed() && t2.completed() && m1.relative_drift <= 1e-8 && worst <= 1e-6 &&
                  secs < 60.0;
  remember("mass-closed", closed, std::move(t1));
  remember("mass-growth", growth, std::move(t2));
  return {ok, fmt("eta=omega=0: relative drift %.3e (<=1e-8); constant eta: max |mass-mass0-eta t| "
                  "%.3e (<=1e-6); runtime %.2fs (<60s)",
                  m1.relative_drift, worst, secs)};
}

Outcome steady_state() {
  bool ok = true;
  std::ostringstream d;
  for (double eps : {0.0, 0.05}) {
    const Scenario sc = fixtures::steady_1d(32, eps);
    const Problem p = render_problem(sc);
    const double rhs_sup = sup_norm(inverse_transform(rhs_regularized(p.rho0, eps, p.data)));
    Trajectory traj = integrate(p);
    const GridField r0 = inverse_transform(p.rho0);
    double drift = 0.0;
    for (const Record& r : traj.records) {
      const GridField g = inverse_transform(r.rho);
      for (std::size_t i = 0; i < g.size(); ++i) drift = std::max(drift, std::abs(g[i] - r0[i]));
    }
    ok = ok && traj.completed() && rhs_sup <= 1e-12 && drift <= 1e-12;
    d << fmt("eps=%g: sup|rhs|=%.2e, max|rho(t)-rho0|=%.2e over %zu records; ", eps, rhs_sup, drift,
             traj.records.size());
    remember(fmt("steady eps=%g", eps), sc, std::move(traj));
  }
  return {ok, d.str() + "tol 1e-12"};
}

Outcome dual_path() {
  std::mt19937_64 rng(7001);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const Scenario sc = fixtures::random_smooth_1d(rng, 256);
    const Problem p = render_problem(sc);
    const GridField a = inverse_transform(diffusion_term(p.rho0, p.data, RhsPath::direct));
    const GridField b = inverse_transform(diffusion_term(p.rho0, p.data, RhsPath::expanded));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += (a[i] - b[i]) * (a[i] - b[i]);
      den += a[i] * a[i];
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {worst <= 1e-8,
          fmt("max relative L2 difference of delta Lap(rho u) over 20 scenarios: %.3e (<=1e-8)", worst)};
}

Outcome rk4_order() {
  Scenario sc = fixtures::generic_1d(64, 0.05);
  sc.solver.t_end = 0.5;
  const double dt = 0.05;
  std::vector<Trajectory> runs;
  for (double h : {dt, dt / 2, dt / 4}) {
    sc.solver.dt_policy = FixedStep{h};
    runs.push_back(run_scenario(sc));
  }
  auto diff = [](const Trajectory& a, const Trajectory& b) {
    return sobolev_norm(a.final_record().rho - b.final_record().rho, 0);
  };
  const double e1 = diff(runs[0], runs[1]);
  const double e2 = diff(runs[1], runs[2]);
  const double order = std::log2(e1 / e2);
  const bool ok = runs[0].completed() && runs[1].completed() && runs[2].completed() &&
                  order >= 3.7 && order <= 4.3;
  remember("rk4 dt/4", sc, std::move(runs[2]));
  return {ok, fmt("dt ladder {%g,%g,%g}: successive L2 differences %.3e, %.3e, observed order %.3f "
                  "(in [3.7,4.3])",
                  dt, dt / 2, dt / 4, e1, e2, order)};
}

Outcome epsilon_ladder() {
  const auto start = Clock::now();
  const Scenario base = fixtures::generic_1d(64, 0.2);
  const std::vector<double> ladder = {0.2, 0.1, 0.05, 0.025};
  const ConvergenceTable t = epsilon_ladder_study(render_problem(base), ladder, 3);
  for (double eps : ladder) {
    Scenario sc = base;
    sc.solver.epsilon = eps;
    remember(fmt("ladder eps=%g", eps), sc, run_scenario(sc));
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "H^3 differences:";
  for (double x : t.differences) d << fmt(" %.4e", x);
  d << fmt("; strictly decreasing=%s, fitted order %.3f (>=0.8); runtime %.2fs (<300s)",
           t.strictly_decreasing ? "yes" : "no", t.order, secs);
  return {t.strictly_decreasing && t.order >= 0.8 && secs < 300.0, d.str()};
}

Outcome uniqueness() {
  Scenario sc = fixtures::generic_1d(128, 0.0);
  sc.solver.t_end = 0.25;
  sc.solver.guard_radius = 1e9;
  // One step size for both grids, stable on the finer one.
  const Problem fine_probe = render_problem(sc, 256);
  sc.solver.dt_policy = FixedStep{stable_dt(0.0, fine_probe.data, 0.5)};
  Problem coarse = render_problem(sc);
  Problem fine = render_problem(sc, 256);
  const ConsistencyReport r = uniqueness_consistency(coarse, fine, 3, 1e-6);

  Trajectory tc = integrate(coarse);
  Trajectory tf = integrate(fine);
  g_runs.push_back({"uniqueness n=128", std::move(tc), [tf] { return tf; }});
  g_runs.push_back({"uniqueness n=256", std::move(tf), {}});
  return {r.passed, fmt("n=128 vs 256, t_end=0.25, eps=0: H^3 difference %.3e (<=1e-6); %s",
                        r.difference, r.verdict.c_str())};
}

Outcome lower_bound_all() {
  if (g_runs.empty()) return {false, "no scenario runs were recorded (run criteria 3-7, 10 first)"};
  bool ok = true;
  std::ostringstream d;
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_name;
  for (const Registered& r : g_runs) {
    const LowerBoundReport lb = lower_bound_audit(r.traj);
    ok = ok && lb.holds;
    if (lb.worst_margin < worst) {
      worst = lb.worst_margin;
      worst_name = r.name;
    }
    if (!lb.holds) d << r.name << " violates (" << lb.violations << " records); ";
  }
  d << fmt("%zu runs, worst margin %.3e (%s), tol 1e-6", g_runs.size(), worst, worst_name.c_str());
  return {ok, d.str()};
}

Outcome energy_all() {
  if (g_runs.empty()) return {false, "no scenario runs were recorded (run criteria 3-7, 10 first)"};
  bool ok = true;
  std::ostringstream d;
  double worst_change = 0.0;
  std::string worst_name;
  std::size_t informative = 0;
  for (const Registered& r : g_runs) {
    const int m = r.traj.sobolev_m;
    const EnergyCertificate cert = certify_energy(energy_trace(r.traj), m);
    if (!cert.holds) {
      ok = false;
      d << r.name << " exceeds its envelope (slack " << cert.worst_slack << "); ";
    }
    if (cert.records_checked > 1 && cert.c_hat > 0.0) ++informative;
    if (!r.refined) continue;
    const Trajectory fine = r.refined();
    const double c2 = energy_inequality_ratio(energy_trace(fine), m);
    const double c1 = cert.c_hat;
    const double change = std::max(c1, c2) > 0.0 ? std::abs(c2 - c1) / std::max(c1, c2) : 0.0;
    if (change >= worst_change) {
      worst_change = change;
      worst_name = r.name + fmt(" (C_hat %.4g -> %.4g)", c1, c2);
    }
    if (!(change < 0.2)) {
      ok = false;
      d << r.name << fmt(" C_hat %.4g -> %.4g under n -> 2n; ", c1, c2);
    }
  }
  d << fmt("%zu runs certified with C_hat*1.1 (%zu with C_hat>0 and records inside T_E beyond t=0); "
           "worst C_hat change %.3e (<0.2) in %s",
           g_runs.size(), informative, worst_change, worst_name.c_str());
  return {ok, d.str()};
}

std::set<int> parse_ids(const std::string& text) {
  std::set<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) ids.insert(std::stoi(item));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, known_red;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--only" || arg == "--known-red") && i + 1 < argc) {
      (arg == "--only" ? only : known_red) = parse_ids(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only 1,2,...] [--known-red 1,...]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "mollifier lemma suite (d=1 n=256, d=2 n=64, m=5, nu=2, 100 seeds)", mollifier_lemmas},
      {2, "envelope and horizon arithmetic", envelope_arithmetic},
      {3, "mass balance (closed and constant-source)", mass_balance},
      {4, "steady state fidelity (eps=0, eps=0.05)", steady_state},
      {5, "direct vs expanded Lap(rho u)", dual_path},
      {6, "RK4 observed order", rk4_order},
      {7, "epsilon ladder {0.2,0.1,0.05,0.025}, m'=3", epsilon_ladder},
      {10, "uniqueness / resolution consistency", uniqueness},
      {8, "lower-bound certificate on all acceptance runs", lower_bound_all},
      {9, "energy envelope certification and C_hat refinement", energy_all},
  };

  std::set<int> failed;
  std::vector<std::pair<int, std::string>> lines;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(c.id);
    lines.emplace_back(c.id, fmt("criterion %2d [%s] %s :: ", c.id, o.pass ? "PASS" : "FAIL",
                                 c.title.c_str()) +
                                 o.detail);
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());

  std::set<int> expected;
  for (int id : known_red)
    if (only.empty() || only.contains(id)) expected.insert(id);
  std::printf("failing: %zu, known red: %zu\n", failed.size(), expected.size());
  return failed == expected ? 0 : 1;
}
