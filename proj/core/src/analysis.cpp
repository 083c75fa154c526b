#include "nlspec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>

#include "nlspec/mollifier_suite.hpp"

namespace nlspec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// d/dt by second-order differences: the centered three-point stencil inside
// (exactly (y+ - y-) / 2h on a uniform grid), one-sided three-point at the
// ends, two-point when only two samples exist.
std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> dy(n, 0.0);
  if (n < 2) return dy;
  if (n == 2) {
    dy[0] = dy[1] = (y[1] - y[0]) / (t[1] - t[0]);
    return dy;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = t[i] - t[i - 1];
    const double h2 = t[i + 1] - t[i];
    dy[i] = (-h2 / (h1 * (h1 + h2))) * y[i - 1] + ((h2 - h1) / (h1 * h2)) * y[i] +
            (h1 / (h2 * (h1 + h2))) * y[i + 1];
  }
  {
    const double h1 = t[1] - t[0];
    const double h2 = t[2] - t[1];
    dy[0] = (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) * y[0] + ((h1 + h2) / (h1 * h2)) * y[1] -
            (h1 / (h2 * (h1 + h2))) * y[2];
  }
  {
    const double h1 = t[n - 2] - t[n - 3];
    const double h2 = t[n - 1] - t[n - 2];
    dy[n - 1] = (h2 / (h1 * (h1 + h2))) * y[n - 3] - ((h1 + h2) / (h1 * h2)) * y[n - 2] +
                ((2.0 * h2 + h1) / (h2 * (h1 + h2))) * y[n - 1];
  }
  return dy;
}

// sum_{|alpha| = order} prod_i (2 pi k_i)^(2 alpha_i)
double homogeneous_weight(int dim, const WaveVector& k, int order) {
  const double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
  const double a = four_pi_sq * k[0] * k[0];
  if (dim == 1) return std::pow(a, order);
  const double b = four_pi_sq * k[1] * k[1];
  double sum = 0.0;
  for (int i = 0; i <= order; ++i) sum += std::pow(a, i) * std::pow(b, order - i);
  return sum;
}

}  // namespace

double energy(const SpectralField& rho, int m) {
  const double n = sobolev_norm(rho, m);
  return 0.5 * n * n;
}

void EnvelopeParams::validate() const {
  if (!(e0 >= 0.0) || !std::isfinite(e0)) throw ContractError("envelope: E0 must be finite and >= 0");
  if (!(c > 0.0) || !std::isfinite(c)) throw ContractError("envelope: C must be finite and > 0");
  if (m < 0) throw ContractError("envelope: m must be >= 0");
}

double existence_horizon(const EnvelopeParams& p) {
  p.validate();
  if (p.e0 < 1.0) return (1.0 - std::sqrt(p.e0)) / (2.0 * p.c);
  const double k = p.m + 1.0;
  return std::pow(p.e0, -k / 2.0) / (k * p.c);
}

double envelope(const EnvelopeParams& p, double t) {
  const double horizon = existence_horizon(p);
  if (!(t >= 0.0)) throw ContractError("envelope: t must be >= 0");
  if (p.e0 < 1.0) {
    if (t > horizon)
      throw ContractError("envelope: t = " + fmt(t) + " beyond the horizon " + fmt(horizon));
    const double r = std::sqrt(p.e0) + 2.0 * p.c * t;
    return r * r;
  }
  if (t >= horizon)
    throw ContractError("envelope: t = " + fmt(t) + " at or beyond the horizon " + fmt(horizon));
  const double k = p.m + 1.0;
  return std::pow(std::pow(p.e0, -k / 2.0) - k * p.c * t, -2.0 / k);
}

EnergyTrace energy_trace(const Trajectory& traj) {
  EnergyTrace trace;
  for (const Record& r : traj.records) {
    trace.times.push_back(r.t);
    trace.energy.push_back(r.diag.energy);
  }
  trace.rate = time_derivative(trace.times, trace.energy);
  return trace;
}

double energy_inequality_ratio(const EnergyTrace& trace, int m) {
  const std::size_t n = trace.times.size();
  if (n < 3 || trace.energy.size() != n || trace.rate.size() != n)
    throw ContractError("energy_inequality_ratio: need at least three consistent samples");
  double c_hat = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double e = trace.energy[i];
    const double denom = std::sqrt(e) + std::pow(e, (m + 3) / 2.0);
    // Increments at the rounding level of E carry no growth information.
    const double scale = std::max({trace.energy[i - 1], e, trace.energy[i + 1]});
    const double h = 0.5 * (trace.times[i + 1] - trace.times[i - 1]);
    if (trace.rate[i] * h <= kEnergyRoundingFloor * scale) continue;
    c_hat = std::max(c_hat, trace.rate[i] / denom);
  }
  return c_hat;
}

EnergyCertificate certify_energy(const EnergyTrace& trace, int m, double margin) {
  EnergyCertificate cert;
  cert.c_hat = energy_inequality_ratio(trace, m);
  cert.c_used = cert.c_hat * (1.0 + margin);
  cert.e0 = trace.energy.front();
  cert.records_total = trace.times.size();
  cert.worst_slack = kInf;

  // Room for rounding in E itself.
  const double slack_tol = 1e-12 * std::max(1.0, cert.e0);
  if (cert.c_used == 0.0) {
    cert.horizon = kInf;
    for (double e : trace.energy) cert.worst_slack = std::min(cert.worst_slack, cert.e0 - e);
    cert.records_checked = trace.energy.size();
  } else {
    const EnvelopeParams p{cert.e0, cert.c_used, m};
    cert.horizon = existence_horizon(p);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      const double t = trace.times[i];
      const bool inside = cert.e0 < 1.0 ? t <= cert.horizon : t < cert.horizon;
      if (!inside) continue;
      ++cert.records_checked;
      cert.worst_slack = std::min(cert.worst_slack, envelope(p, t) - trace.energy[i]);
    }
  }
  cert.holds = cert.worst_slack >= -slack_tol;
  return cert;
}

MassReport mass_audit(const Trajectory& traj, const ModelData& data) {
  if (traj.records.size() < 2)
    throw ContractError("mass_audit: need at least two records, got " +
                        std::to_string(traj.records.size()));
  MassReport report;
  std::vector<double> source;
  const double eta_int = integral(data.eta());
  for (const Record& r : traj.records) {
    report.times.push_back(r.t);
    report.mass.push_back(r.diag.mass);
    const GridField rho = inverse_transform(r.rho);
    double omega_rho = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) omega_rho += data.omega()[i] * rho[i];
    source.push_back(eta_int - omega_rho / static_cast<double>(rho.size()));
  }
  const std::vector<double> dmass = time_derivative(report.times, report.mass);
  report.residual.resize(dmass.size());
  for (std::size_t i = 0; i < dmass.size(); ++i) {
    report.residual[i] = dmass[i] - source[i];
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(report.residual[i]));
  }
  const double m0 = report.mass.front();
  report.relative_drift = std::abs(report.mass.back() - m0) / std::abs(m0);
  return report;
}

LowerBoundReport lower_bound_audit(const Trajectory& traj, double varpi, double tol) {
  LowerBoundReport report;
  report.tolerance = tol;
  report.k_star = traj.k_star();
  bool any = false;
  report.worst_margin = 0.0;
  for (const Record& r : traj.records) {
    if (r.t <= 0.0) continue;
    const double margin = r.diag.min_rho - (traj.rho_floor - r.k_star * r.t);
    report.worst_margin = any ? std::min(report.worst_margin, margin) : margin;
    any = true;
    if (!(margin >= -tol)) ++report.violations;
  }
  report.holds = report.violations == 0;
  report.varpi = varpi;
  report.floor_horizon = report.k_star > 0.0 ? traj.rho_floor / (4.0 * report.k_star) : kInf;
  report.t_m = std::min(report.varpi, report.floor_horizon);
  return report;
}

CancellationReport nonlocal_cancellation_audit(const Trajectory& traj, const ModelData& data,
                                               double tol) {
  CancellationReport report;
  report.tolerance = tol;
  const ModelParams& p = data.params();
  for (const Record& r : traj.records) {
    const GridField rho = inverse_transform(r.rho);
    std::vector<double> q(rho.size());
    double q_l1 = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] = data.gamma()[i] * rho[i] * unattractiveness(data.kappa()[i], rho[i], p);
      q_l1 += std::abs(q[i]);
    }
    q_l1 /= static_cast<double>(q.size());
    const GridField exchange = nonlocal_exchange(rho, data);
    const double net = std::abs(integral(exchange));
    const double ratio = q_l1 > 0.0 ? net / q_l1 : (net == 0.0 ? 0.0 : kInf);
    report.worst_ratio = std::max(report.worst_ratio, ratio);
  }
  report.holds = report.worst_ratio <= tol;
  return report;
}

double dissipation_integral(const Trajectory& traj, int m) {
  std::vector<double> values;
  for (const Record& r : traj.records) {
    const SpectralField smoothed = mollify(r.rho, traj.epsilon);
    const TorusGrid& grid = smoothed.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      sum += homogeneous_weight(grid.dim(), grid.wavevector(i), m + 1) * std::norm(smoothed[i]);
    values.push_back(sum);
  }
  double total = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i)
    total += 0.5 * (values[i] + values[i - 1]) * (traj.records[i].t - traj.records[i - 1].t);
  return total;
}

double fit_order(std::span<const double> epsilons, std::span<const double> differences) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < differences.size(); ++i) {
    if (differences[i] > 0.0 && epsilons[i] > 0.0) {
      xs.push_back(std::log(epsilons[i]));
      ys.push_back(std::log(differences[i]));
    }
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

ConvergenceTable epsilon_ladder_study(const Problem& base, std::span<const double> epsilons,
                                      int m_prime) {
  const int dim = base.data.grid().dim();
  const int guard_m = base.config.sobolev_index(dim);
  if (epsilons.size() < 2) throw ContractError("epsilon ladder needs at least two entries");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw ContractError("epsilon ladder entries must be positive");
    if (i > 0 && epsilons[i] > epsilons[i - 1])
      throw ContractError("epsilon ladder must be non-increasing");
  }
  if (!(2 * m_prime > dim)) throw ContractError("m' must exceed d/2");
  if (!(m_prime < guard_m)) throw ContractError("m' must be below the guard index m");

  std::vector<std::future<Trajectory>> runs;
  runs.reserve(epsilons.size());
  for (double eps : epsilons) {
    runs.push_back(std::async(std::launch::async, [&base, eps] {
      Problem p = base;
      p.config.epsilon = eps;
      return integrate(p);
    }));
  }
  std::vector<Trajectory> results;
  for (auto& f : runs) results.push_back(f.get());

  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].completed())
      throw StudyAborted("epsilon-ladder run with eps = " + fmt(epsilons[i]) + " ended with " +
                             to_string(results[i].status.kind) + " at t = " +
                             fmt(results[i].status.t) + ": " + results[i].status.detail,
                         epsilons[i]);
  }

  ConvergenceTable table;
  table.epsilons.assign(epsilons.begin(), epsilons.end());
  table.m_prime = m_prime;
  for (std::size_t i = 0; i + 1 < results.size(); ++i)
    table.differences.push_back(
        sobolev_norm(results[i].final_record().rho - results[i + 1].final_record().rho, m_prime));
  table.order = fit_order(std::span<const double>(table.epsilons).first(table.differences.size()),
                          table.differences);
  table.strictly_decreasing = true;
  for (std::size_t i = 1; i < table.differences.size(); ++i)
    if (!(table.differences[i] < table.differences[i - 1])) table.strictly_decreasing = false;
  return table;
}

ConsistencyReport uniqueness_consistency(const Problem& coarse, const Problem& fine, int m_prime,
                                         double threshold) {
  const int n1 = coarse.data.grid().n();
  const int n2 = fine.data.grid().n();
  if (n2 != 2 * n1) throw ContractError("uniqueness_consistency: fine grid must be twice the coarse");
  if (!(coarse.config.t_end == fine.config.t_end))
    throw ContractError("uniqueness_consistency: runs must share t_end");

  auto fine_run = std::async(std::launch::async, [&fine] { return integrate(fine); });
  const Trajectory a = integrate(coarse);
  const Trajectory b = fine_run.get();
  for (const auto* t : {&a, &b}) {
    if (!t->completed())
      throw StudyAborted("resolution run on n = " +
                             std::to_string(t->final_record().rho.grid().n()) + " ended with " +
                             to_string(t->status.kind) + ": " + t->status.detail,
                         t->epsilon);
  }

  ConsistencyReport report;
  report.n_coarse = n1;
  report.n_fine = n2;
  report.m_prime = m_prime;
  report.threshold = threshold;
  const SpectralField up = resample(a.final_record().rho, n2);
  report.difference = sobolev_norm(up - b.final_record().rho, m_prime);
  report.passed = report.difference <= threshold;

  if (report.passed) {
    report.verdict = "consistent: H^" + std::to_string(m_prime) + " difference " +
                     fmt(report.difference) + " <= " + fmt(threshold);
  } else {
    // Share of the fine solution's H^m' norm living above the coarse band.
    const SpectralField& f = b.final_record().rho;
    const TorusGrid& g = f.grid();
    double total = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const WaveVector k = g.wavevector(i);
      const double w = sobolev_weight(g.dim(), k, m_prime) * std::norm(f[i]);
      total += w;
      if (std::abs(k[0]) >= n1 / 2 || std::abs(k[1]) >= n1 / 2) outside += w;
    }
    const double share = total > 0.0 ? std::sqrt(outside / total) : 0.0;
    report.verdict = "inconsistent: H^" + std::to_string(m_prime) + " difference " +
                     fmt(report.difference) + " exceeds " + fmt(threshold) + "; " + fmt(share) +
                     " of the fine solution's norm lies beyond the n = " + std::to_string(n1) +
                     " band, so the data are under-resolved on the coarse grid";
  }
  return report;
}

LipschitzProbe lipschitz_probe(const ModelData& data, double eps, int m, std::size_t seeds,
                               std::uint64_t seed) {
  const TorusGrid& grid = data.grid();
  std::mt19937_64 rng(seed);
  // Perturbations of the constant 1 scaled to a fixed H^m radius.
  const double radius = 0.05;
  auto sample = [&] {
    SpectralField p = random_band_limited(grid, 16.0, rng);
    std::vector<Complex> c(p.coeffs());
    c[0] = 0.0;
    SpectralField zero_mean(grid, std::move(c));
    const double scale = radius / sobolev_norm(zero_mean, m);
    std::vector<Complex> out((scale * zero_mean).coeffs());
    out[0] += 1.0;
    return SpectralField(grid, std::move(out));
  };
  LipschitzProbe probe;
  for (std::size_t s = 0; s < seeds; ++s) {
    const SpectralField r1 = sample();
    const SpectralField r2 = sample();
    const double num = sobolev_norm(rhs_regularized(r1, eps, data) - rhs_regularized(r2, eps, data), m);
    const double den = sobolev_norm(r1 - r2, m);
    if (den > 0.0) probe.max_ratio = std::max(probe.max_ratio, num / den);
    ++probe.samples;
  }
  return probe;
}

}  // namespace nlspec
