// nlspec command-line front end.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlspec/analysis.hpp"
#include "nlspec/mollifier_suite.hpp"
#include "nlspec/outputs.hpp"
#include "nlspec/scenario.hpp"

namespace {

using namespace nlspec;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw CLI::ValidationError("--epsilons", "bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int simulate(const std::string& scenario_path, const std::string& out_dir, bool snapshots) {
  const Scenario sc = load_scenario(scenario_path);
  const Problem problem = render_problem(sc);
  const Trajectory traj = integrate(problem);
  ReportBundle report = build_run_report(traj, problem.data);
  report.command = "simulate";
  write_outputs(traj, report, out_dir.empty() ? sc.output_dir : out_dir, snapshots);

  std::printf("status: %s", to_string(traj.status.kind).c_str());
  if (traj.status.guard) std::printf(" (%s)", to_string(*traj.status.guard).c_str());
  std::printf(" at t = %.6g after %zu steps\n", traj.status.t, traj.steps);
  std::printf("C_hat = %.6g, T_m = %.6g\n", report.c_hat, report.t_m);
  for (const AuditEntry& a : report.audits)
    std::printf("  %-22s %-7s value %.3e (tol %.1e)\n", a.name.c_str(), a.verdict.c_str(), a.value,
                a.tolerance);
  return traj.completed() ? 0 : 2;
}

int epsilon_study(const std::string& scenario_path, const std::string& epsilons,
                  std::optional<int> m_prime, const std::string& out_dir) {
  const Scenario sc = load_scenario(scenario_path);
  const std::vector<double> ladder =
      epsilons.empty() ? sc.studies.epsilon_ladder : parse_list(epsilons);
  const int mp = m_prime ? *m_prime : sc.studies.m_prime.value_or(3);
  const ConvergenceTable table = epsilon_ladder_study(render_problem(sc), ladder, mp);
  write_convergence(table, out_dir.empty() ? sc.output_dir : out_dir);
  for (std::size_t i = 0; i < table.differences.size(); ++i)
    std::printf("eps %.6g -> %.6g : ||diff||_{H^%d} = %.6e\n", table.epsilons[i],
                table.epsilons[i + 1], mp, table.differences[i]);
  std::printf("fitted order %.4f, strictly decreasing: %s\n", table.order,
              table.strictly_decreasing ? "yes" : "no");
  return 0;
}

int verify(const MollifierSuiteConfig& cfg) {
  const MollifierSuiteReport r = mollifier_lemma_suite(cfg);
  std::printf("mollifier suite: d=%d n=%d m=%d nu=%d seeds=%d seed=%llu band |k|^2<=%.4f\n",
              cfg.dim, cfg.n, cfg.m, cfg.nu, cfg.seeds,
              static_cast<unsigned long long>(cfg.seed), r.band_k2);
  for (const LemmaCheck& c : r.checks)
    std::printf("  [%s] item %-13s worst %.3e tol %.3e  %s\n", c.passed ? "PASS" : "FAIL",
                c.item.c_str(), c.worst, c.tolerance, c.description.c_str());
  std::printf("  item 5 literal max/min ratio over the ladder: %.3e\n", r.item5_max_over_min);
  return r.all_passed() ? 0 : 1;
}

int envelope_cmd(double e0, double c, int m, double t_max, int samples) {
  const EnvelopeParams p{e0, c, m};
  p.validate();
  const double te = existence_horizon(p);
  std::printf("T_E = %.17g\n", te);
  std::printf("t,envelope\n");
  for (int i = 0; i <= samples; ++i) {
    const double t = t_max * i / samples;
    const bool inside = e0 < 1.0 ? t <= te : t < te;
    if (!inside) break;
    std::printf("%.17g,%.17g\n", t, envelope(p, t));
  }
  return 0;
}

int resolution_check(const std::string& scenario_path, int n2, std::optional<int> m_prime,
                     const std::string& out_dir) {
  const Scenario sc = load_scenario(scenario_path);
  const int mp = m_prime ? *m_prime : sc.studies.m_prime.value_or(3);
  const ConsistencyReport r =
      uniqueness_consistency(render_problem(sc), render_problem(sc, n2), mp);
  write_consistency(r, out_dir.empty() ? sc.output_dir : out_dir);
  std::printf("n %d vs %d: ||diff||_{H^%d} = %.6e (threshold %.1e) %s\n%s\n", r.n_coarse,
              r.n_fine, mp, r.difference, r.threshold, r.passed ? "PASS" : "FAIL",
              r.verdict.c_str());
  return r.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral simulator for a nonlocal crowding-diffusion model on the torus"};
  app.require_subcommand(1);

  std::string scenario, out, epsilons;
  bool snapshots = false;
  std::optional<int> m_prime;
  int n2 = 0;
  MollifierSuiteConfig suite;
  double e0 = 0, c = 0, t_max = 0;
  int env_m = 0, samples = 20;

  auto* sim = app.add_subcommand("simulate", "single run with audits");
  sim->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "output directory (default: scenario output_dir)");
  sim->add_flag("--snapshots", snapshots, "write a field snapshot per record");

  auto* study = app.add_subcommand("epsilon-study", "epsilon convergence ladder");
  study->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  study->add_option("--epsilons", epsilons, "comma-separated ladder, e.g. 0.2,0.1,0.05,0.025");
  study->add_option("--m-prime", m_prime, "Sobolev index of the differences");
  study->add_option("--out", out, "output directory");

  auto* ver = app.add_subcommand("verify", "mollifier lemma suite; exit 0 iff all items pass");
  ver->add_option("--dim", suite.dim)->check(CLI::IsMember({1, 2}));
  ver->add_option("--n", suite.n);
  ver->add_option("--m", suite.m);
  ver->add_option("--nu", suite.nu);
  ver->add_option("--seeds", suite.seeds);
  ver->add_option("--seed", suite.seed, "generator seed (recorded in the report)");

  auto* env = app.add_subcommand("envelope", "print energy envelope samples and T_E");
  env->add_option("--e0", e0)->required();
  env->add_option("--c", c)->required();
  env->add_option("--m", env_m)->required();
  env->add_option("--t-max", t_max)->required();
  env->add_option("--samples", samples)->check(CLI::PositiveNumber);

  auto* res = app.add_subcommand("resolution-check", "n vs 2n consistency experiment");
  res->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  res->add_option("--n2", n2, "fine grid size")->required();
  res->add_option("--m-prime", m_prime, "Sobolev index of the difference");
  res->add_option("--out", out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(scenario, out, snapshots);
    if (*study) return epsilon_study(scenario, epsilons, m_prime, out);
    if (*ver) return verify(suite);
    if (*env) return envelope_cmd(e0, c, env_m, t_max, samples);
    if (*res) return resolution_check(scenario, n2, m_prime, out);
  } catch (const ValidationError& e) {
    std::cerr << "validation error [" << e.rule() << "]: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
