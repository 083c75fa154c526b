#pragma once

// Measurements over trajectories: energy envelopes and horizons, audits of
// mass balance, the pointwise lower bound and nonlocal cancellation, the
// epsilon-ladder convergence study and the resolution consistency check.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nlspec/integrator.hpp"

namespace nlspec {

/// E_m = (1/2) ||rho||_{H^m}^2.
double energy(const SpectralField& rho, int m);

struct EnvelopeParams {
  double e0;  // initial energy, >= 0
  double c;   // rate constant, > 0
  int m;      // Sobolev index, >= 0

  void validate() const;
};

/// Blow-up horizon of the envelope:
///   (1 - sqrt(E0)) / (2C)                    for E0 < 1,
///   E0^{-(m+1)/2} / ((m+1) C)                for E0 >= 1.
double existence_horizon(const EnvelopeParams& p);

/// Closed-form comparison solution of E' = C (E^{1/2} + E^{(m+3)/2}):
///   (sqrt(E0) + 2 C t)^2                     for E0 < 1,
///   (E0^{-(m+1)/2} - (m+1) C t)^{-2/(m+1)}   for E0 >= 1.
/// Defined on [0, T_E] when E0 < 1 (reaching exactly 1 at T_E) and on
/// [0, T_E) otherwise; other t throw ContractError.
double envelope(const EnvelopeParams& p, double t);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> rate;  // centered differences inside, one-sided at the ends (second order)
};

EnergyTrace energy_trace(const Trajectory& traj);

/// Relative size below which an energy increment over one record spacing is
/// treated as rounding noise.
inline constexpr double kEnergyRoundingFloor = 64.0 * std::numeric_limits<double>::epsilon();

/// C_hat = max over interior samples of max(E', 0) / (E^{1/2} + E^{(m+3)/2}).
/// Samples whose increment E' h is within kEnergyRoundingFloor * E count as zero.
/// Throws ContractError for fewer than three samples.
double energy_inequality_ratio(const EnergyTrace& trace, int m);

struct EnergyCertificate {
  double c_hat = 0.0;
  double c_used = 0.0;   // c_hat * (1 + margin)
  double e0 = 0.0;
  double horizon = 0.0;  // existence_horizon with c_used; +inf when c_used = 0
  std::size_t records_checked = 0;  // records with t inside the horizon
  std::size_t records_total = 0;
  double worst_slack = 0.0;         // min over checked records of envelope - E
  bool holds = false;
};

/// Checks E(t) <= envelope(E0, C_hat (1 + margin), m, t) on every record
/// inside the envelope's horizon.
EnergyCertificate certify_energy(const EnergyTrace& trace, int m, double margin = 0.1);

struct MassReport {
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> residual;  // d/dt mass - (int eta - int omega rho)
  double max_abs_residual = 0.0;
  double relative_drift = 0.0;   // |mass(end) - mass(0)| / |mass(0)|
};

/// Throws ContractError for a trajectory with fewer than two records.
MassReport mass_audit(const Trajectory& traj, const ModelData& data);

struct LowerBoundReport {
  double tolerance = 1e-6;
  double worst_margin = 0.0;  // min over t > 0 of min rho(t) - (rho_floor - K* t)
  std::size_t violations = 0;
  bool holds = true;
  double k_star = 0.0;
  double varpi = 0.0;         // energy horizon used for T_m
  double floor_horizon = 0.0; // rho_floor / (4 K*)
  double t_m = 0.0;           // min(varpi, floor_horizon)
};

/// Checks min rho(t) >= rho_floor - K*(t) t - tol at every record, K*(t) the
/// running stage-rhs sup recorded by the integrator.
LowerBoundReport lower_bound_audit(const Trajectory& traj,
                                   double varpi = std::numeric_limits<double>::infinity(),
                                   double tol = 1e-6);

struct CancellationReport {
  double tolerance = 1e-10;
  double worst_ratio = 0.0;  // |int (I[q] - q)| / ||q||_{L^1}, q = gamma rho u
  bool holds = true;
};

CancellationReport nonlocal_cancellation_audit(const Trajectory& traj, const ModelData& data,
                                               double tol = 1e-10);

/// Trapezoid-rule integral of ||D^{m+1} J_eps rho||_{L^2}^2 over the records.
double dissipation_integral(const Trajectory& traj, int m);

struct ConvergenceTable {
  std::vector<double> epsilons;
  std::vector<double> differences;  // ||rho_i - rho_{i+1}||_{H^m'} at t_end
  int m_prime = 0;
  double order = std::numeric_limits<double>::quiet_NaN();  // log-log slope
  bool strictly_decreasing = false;
};

/// Thrown when a ladder run leaves O_K or fails a step.
class StudyAborted : public Error {
 public:
  StudyAborted(const std::string& what, double epsilon) : Error(what), epsilon_(epsilon) {}
  double epsilon() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

/// Runs `base` once per epsilon (concurrently, results ordered by the ladder)
/// and tabulates successive H^{m'} differences at t_end. The ladder must be
/// non-increasing and positive; m' must satisfy d/2 < m' < guard m.
ConvergenceTable epsilon_ladder_study(const Problem& base, std::span<const double> epsilons,
                                      int m_prime);

/// Least-squares slope of log(difference) against log(epsilon) over pairs
/// with a positive difference; NaN with fewer than two.
double fit_order(std::span<const double> epsilons, std::span<const double> differences);

struct ConsistencyReport {
  int n_coarse = 0;
  int n_fine = 0;
  int m_prime = 0;
  double difference = 0.0;
  double threshold = 1e-6;
  bool passed = false;
  std::string verdict;
};

/// Runs the same problem on two grids (n_fine = 2 n_coarse), up-samples the
/// coarse result and measures the H^{m'} difference at t_end. Throws
/// StudyAborted if either run does not complete.
ConsistencyReport uniqueness_consistency(const Problem& coarse, const Problem& fine, int m_prime,
                                         double threshold = 1e-6);

struct LipschitzProbe {
  double max_ratio = 0.0;
  std::size_t samples = 0;
};

/// max ||A[r1] - A[r2]||_{H^m} / ||r1 - r2||_{H^m} over random smooth positive
/// pairs in a fixed H^m ball. Reported, not bounded.
LipschitzProbe lipschitz_probe(const ModelData& data, double eps, int m, std::size_t seeds,
                               std::uint64_t seed);

}  // namespace nlspec
