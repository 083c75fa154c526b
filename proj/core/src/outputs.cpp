#include "nlspec/outputs.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace nlspec {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no inf/nan; those become strings so the reader sees them.
json jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

AuditEntry audit(std::string name, double value, double tol, bool ok, std::string detail = {}) {
  return {std::move(name), value, tol, ok ? "pass" : "fail", std::move(detail)};
}

}  // namespace

ReportBundle build_run_report(const Trajectory& traj, const ModelData& data) {
  ReportBundle r;
  r.status = traj.status;
  const int m = traj.sobolev_m;

  double varpi = std::numeric_limits<double>::infinity();
  if (traj.records.size() >= 3) {
    const EnergyCertificate cert = certify_energy(energy_trace(traj), m);
    r.c_hat = cert.c_hat;
    varpi = cert.horizon;
    r.audits.push_back(audit("energy_envelope", cert.worst_slack, 0.0, cert.holds,
                             "min over records of envelope(C_hat * 1.1) - E_m; " +
                                 std::to_string(cert.records_checked) + " of " +
                                 std::to_string(cert.records_total) + " records inside T_E"));
    r.metrics.push_back({"energy_horizon", cert.horizon});
  } else {
    r.audits.push_back({"energy_envelope", 0.0, 0.0, "skipped", "needs at least three records"});
  }

  if (traj.records.size() >= 2) {
    const MassReport mass = mass_audit(traj, data);
    const double scale = std::max(1.0, std::abs(mass.mass.front()));
    const double tol = 1e-6 * scale;
    r.audits.push_back(audit("mass_balance", mass.max_abs_residual, tol,
                             mass.max_abs_residual <= tol,
                             "max |d/dt mass - (int eta - int omega rho)|, second-order differences"));
    r.metrics.push_back({"mass_relative_drift", mass.relative_drift});
  } else {
    r.audits.push_back({"mass_balance", 0.0, 0.0, "skipped", "needs at least two records"});
  }

  const LowerBoundReport lb = lower_bound_audit(traj, varpi);
  r.t_m = lb.t_m;
  r.audits.push_back(audit("lower_bound", lb.worst_margin, lb.tolerance, lb.holds,
                           "min rho(t) - (rho_floor - K* t) >= -tolerance; " +
                               std::to_string(lb.violations) + " violations"));
  r.metrics.push_back({"k_star", lb.k_star});
  r.metrics.push_back({"rho_floor", traj.rho_floor});
  r.metrics.push_back({"floor_horizon", lb.floor_horizon});

  const CancellationReport cr = nonlocal_cancellation_audit(traj, data);
  r.audits.push_back(audit("nonlocal_cancellation", cr.worst_ratio, cr.tolerance, cr.holds,
                           "|int (I[q] - q)| / ||q||_{L1}, q = gamma rho u"));

  r.metrics.push_back({"dissipation_integral", dissipation_integral(traj, m)});
  r.metrics.push_back({"sobolev_m", static_cast<double>(m)});
  r.metrics.push_back({"epsilon", traj.epsilon});
  r.metrics.push_back({"steps", static_cast<double>(traj.steps)});
  return r;
}

void write_timeseries(const Trajectory& traj, const fs::path& path) {
  std::ofstream out = open_for_write(path);
  out << "t,mass,min_rho,max_rho,energy_m,sup_rhs,dt\n";
  for (const Record& rec : traj.records) {
    const Diagnostics& d = rec.diag;
    out << num(rec.t) << ',' << num(d.mass) << ',' << num(d.min_rho) << ',' << num(d.max_rho)
        << ',' << num(d.energy) << ',' << num(d.sup_rhs) << ',' << num(rec.dt) << '\n';
  }
  finish(out, path);
}

void write_summary(const ReportBundle& r, const fs::path& path) {
  json j;
  if (!r.command.empty()) j["command"] = r.command;
  json status;
  status["kind"] = to_string(r.status.kind);
  if (r.status.guard) status["guard"] = to_string(*r.status.guard);
  status["t"] = jnum(r.status.t);
  status["detail"] = r.status.detail;
  j["terminal_status"] = status;
  j["T_m"] = jnum(r.t_m);
  j["C_hat"] = jnum(r.c_hat);
  j["audits"] = json::array();
  for (const AuditEntry& a : r.audits)
    j["audits"].push_back({{"name", a.name},
                           {"value", jnum(a.value)},
                           {"tolerance", jnum(a.tolerance)},
                           {"verdict", a.verdict},
                           {"detail", a.detail}});
  json metrics = json::object();
  for (const Metric& m : r.metrics) metrics[m.name] = jnum(m.value);
  j["metrics"] = metrics;

  std::ofstream out = open_for_write(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_snapshot(const GridField& rho, const fs::path& path) {
  const TorusGrid& g = rho.grid();
  std::ofstream out = open_for_write(path);
  out << (g.dim() == 1 ? "x1,rho\n" : "x1,x2,rho\n");
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << num(g.coordinate(i, 0)) << ',';
    if (g.dim() == 2) out << num(g.coordinate(i, 1)) << ',';
    out << num(rho[i]) << '\n';
  }
  finish(out, path);
}

void write_outputs(const Trajectory& traj, const ReportBundle& report, const fs::path& dir,
                   bool snapshots) {
  ensure_dir(dir);
  write_timeseries(traj, dir / "timeseries.csv");
  write_summary(report, dir / "summary.json");
  if (snapshots)
    for (std::size_t i = 0; i < traj.records.size(); ++i)
      write_snapshot(inverse_transform(traj.records[i].rho),
                     dir / ("snapshot_" + std::to_string(i) + ".csv"));
}

void write_convergence(const ConvergenceTable& t, const fs::path& dir) {
  ensure_dir(dir);
  const fs::path csv = dir / "convergence.csv";
  {
    std::ofstream out = open_for_write(csv);
    out << "epsilon_coarse,epsilon_fine,difference\n";
    for (std::size_t i = 0; i < t.differences.size(); ++i)
      out << num(t.epsilons[i]) << ',' << num(t.epsilons[i + 1]) << ','
          << num(t.differences[i]) << '\n';
    finish(out, csv);
  }
  json j;
  j["epsilons"] = t.epsilons;
  json diffs = json::array();
  for (double d : t.differences) diffs.push_back(jnum(d));
  j["differences"] = diffs;
  j["m_prime"] = t.m_prime;
  j["order"] = jnum(t.order);
  j["strictly_decreasing"] = t.strictly_decreasing;
  const fs::path path = dir / "summary.json";
  std::ofstream out = open_for_write(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_consistency(const ConsistencyReport& r, const fs::path& dir) {
  ensure_dir(dir);
  json j;
  j["n_coarse"] = r.n_coarse;
  j["n_fine"] = r.n_fine;
  j["m_prime"] = r.m_prime;
  j["difference"] = jnum(r.difference);
  j["threshold"] = jnum(r.threshold);
  j["verdict"] = r.passed ? "pass" : "fail";
  j["detail"] = r.verdict;
  const fs::path path = dir / "summary.json";
  std::ofstream out = open_for_write(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace nlspec
