#pragma once

// Method-of-lines integration of rho' = A_eps[rho] with classical RK4.
//
// A run lives in the open set
//   O_K = { rho : ||rho||_{H^m} < K,  min rho > rho_floor / 2 },
// rho_floor = min rho_0, and halts with a guard event when it leaves.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlspec/errors.hpp"
#include "nlspec/model.hpp"
#include "nlspec/spectral.hpp"

namespace nlspec {

/// Real-axis stability extent of classical RK4.
inline constexpr double kRk4StabilityExtent = 2.785;

struct FixedStep {
  double dt;
};
struct AutoStep {
  double safety;  // in (0, 1]
};
using StepPolicy = std::variant<FixedStep, AutoStep>;

struct SolverConfig {
  double epsilon = 0.0;
  StepPolicy dt_policy = AutoStep{0.5};
  double t_end = 1.0;
  /// Radius K of the H^m ball.
  double guard_radius = std::numeric_limits<double>::infinity();
  /// Sobolev index of the guard and of the energy; 0 selects dim + 4.
  int guard_m = 0;
  int record_every = 1;
  RhsOptions rhs{};

  /// Throws ContractError on out-of-range settings.
  void validate() const;
  int sobolev_index(int dim) const noexcept { return guard_m > 0 ? guard_m : dim + 4; }
};

struct Diagnostics {
  double mass = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double energy = 0.0;   // (1/2) ||rho||_{H^m}^2
  double sup_rhs = 0.0;  // ||A_eps[rho]||_{L^inf}; NaN when the rhs is undefined
};

struct RunState {
  double t = 0.0;
  SpectralField rho;
  double rho_floor = 0.0;
  Diagnostics diag;
  /// A_eps[rho], empty when rho left the positive cone or is not finite.
  std::optional<SpectralField> rhs;
};

/// Builds a state at time t and evaluates its diagnostics and right-hand side.
RunState make_state(double t, SpectralField rho, double rho_floor, double eps,
                    const ModelData& data, int sobolev_m, const RhsOptions& options = {});

/// Decomposed stability bound; dt = safety * 2.785 / (diffusion + reaction).
struct StiffnessEstimate {
  double diffusion;  // delta u+ max_k 4 pi^2 |k|^2 exp(-2 eps |k|^2)
  double reaction;   // sup omega + sup gamma
};
StiffnessEstimate stiffness(double eps, const ModelData& data);

/// Largest stable RK4 step, capped at `cap` (infinite stiffness-free case).
double stable_dt(double eps, const ModelData& data, double safety,
                 double cap = std::numeric_limits<double>::infinity());

/// Thrown by step_rk4 when a stage leaves the domain of the rhs.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double stage_time) : Error(what), stage_time_(stage_time) {}
  double stage_time() const noexcept { return stage_time_; }

 private:
  double stage_time_;
};

struct StepResult {
  RunState next;
  /// max over the four stages of ||k_i||_{L^inf}; bounds |rho_next - rho| / dt pointwise.
  double stage_sup = 0.0;
};

/// One classical RK4 step. `state.rhs` must be present and is used as k1.
StepResult step_rk4(const RunState& state, double dt, double eps, const ModelData& data,
                    int sobolev_m, const RhsOptions& options = {});

enum class GuardKind { norm_exit, positivity_exit, nonfinite };
std::string to_string(GuardKind kind);

/// Outcome of testing O_K membership; nullopt means the state is inside.
std::optional<GuardKind> guard_check(const RunState& state, const SolverConfig& config);

struct Record {
  double t;
  double dt;  // step that produced this record; 0 for the initial record
  SpectralField rho;
  Diagnostics diag;
  /// Running sup of the stage rhs norms up to t (the K* proxy).
  double k_star;
};

enum class TerminalKind { completed, guard, step_failure };
std::string to_string(TerminalKind kind);

struct TerminalStatus {
  TerminalKind kind = TerminalKind::completed;
  std::optional<GuardKind> guard;
  double t = 0.0;
  std::string detail;
};

struct Trajectory {
  std::vector<Record> records;
  TerminalStatus status;
  double rho_floor = 0.0;
  double epsilon = 0.0;
  int sobolev_m = 0;
  std::size_t steps = 0;

  bool completed() const noexcept { return status.kind == TerminalKind::completed; }
  const Record& final_record() const { return records.back(); }
  double k_star() const { return records.empty() ? 0.0 : records.back().k_star; }
};

/// Everything a single run needs.
struct Problem {
  ModelData data;
  SpectralField rho0;
  SolverConfig config;
};

/// Integrates until t_end or a guard event. Deterministic for a given problem.
/// Throws ContractError on invalid configuration or a non-positive rho_0.
Trajectory integrate(const Problem& problem);

}  // namespace nlspec
