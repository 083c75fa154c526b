#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlspec/analysis.hpp"

namespace nlspec {

struct AuditEntry {
  std::string name;
  double value = 0.0;      // the audited statistic
  double tolerance = 0.0;
  std::string verdict;     // "pass", "fail" or "skipped"
  std::string detail;
};

struct Metric {
  std::string name;
  double value = 0.0;
};

/// Machine-readable summary of one run.
struct ReportBundle {
  std::string command;
  TerminalStatus status;
  double t_m = 0.0;
  double c_hat = 0.0;
  std::vector<AuditEntry> audits;
  std::vector<Metric> metrics;
};

/// Runs the energy certificate, mass balance, lower bound and nonlocal
/// cancellation audits on a trajectory.
ReportBundle build_run_report(const Trajectory& traj, const ModelData& data);

/// CSV with header t,mass,min_rho,max_rho,energy_m,sup_rhs,dt, 17 significant digits.
void write_timeseries(const Trajectory& traj, const std::filesystem::path& path);
void write_summary(const ReportBundle& report, const std::filesystem::path& path);
/// One `x1[,x2],rho` row per grid point.
void write_snapshot(const GridField& rho, const std::filesystem::path& path);

/// timeseries.csv + summary.json (+ snapshot_<i>.csv for each record when
/// `snapshots` is set) in `dir`, created if needed.
void write_outputs(const Trajectory& traj, const ReportBundle& report,
                   const std::filesystem::path& dir, bool snapshots = false);

void write_convergence(const ConvergenceTable& table, const std::filesystem::path& dir);
void write_consistency(const ConsistencyReport& report, const std::filesystem::path& dir);

}  // namespace nlspec
