#pragma once

// Scenario files: a versioned JSON document describing grid, model data,
// initial condition, solver settings and optional study blocks.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlspec/integrator.hpp"

namespace nlspec {

inline constexpr int kScenarioSchemaVersion = 1;

struct ConstantSpec {
  double value = 0.0;
};

struct ModeTerm {
  WaveVector k{0, 0};
  double amplitude = 0.0;
  double phase = 0.0;
};

/// offset + sum amplitude cos(2 pi k.x + phase).
struct ModesSpec {
  double offset = 0.0;
  std::vector<ModeTerm> modes;
};

/// baseline + height * sum over periodic images of exp(-|x - c|^2 / (2 width^2)).
struct GaussianBumpSpec {
  std::array<double, 2> center{0.0, 0.0};
  double width = 0.1;
  double height = 1.0;
  double baseline = 0.0;
};

using FieldSpec = std::variant<ConstantSpec, ModesSpec, GaussianBumpSpec>;

struct UniformKernelSpec {};
struct SeparableKernelSpec {
  FieldSpec a;
  FieldSpec b;
};
/// Sidecar of little-endian float64 values, y-major, n^d x n^d entries.
struct DenseKernelSpec {
  std::string path;  // as written in the scenario (relative to the scenario file)
  std::vector<double> values;
};
using KernelSpec = std::variant<UniformKernelSpec, SeparableKernelSpec, DenseKernelSpec>;

struct StudySpec {
  std::vector<double> epsilon_ladder;
  std::optional<int> m_prime;
  std::optional<int> resolution_n2;
};

struct Scenario {
  int dim = 1;
  int n = 64;
  double delta = 0.0;
  double u_plus = 0.0;
  double u_minus = 0.0;
  double rho_tilde = 0.0;
  FieldSpec kappa;
  FieldSpec eta;
  FieldSpec omega;
  FieldSpec gamma;
  FieldSpec rho0;
  KernelSpec kernel;
  SolverConfig solver;
  StudySpec studies;
  std::string output_dir = "out";
};

/// Deterministic rendering on the grid. Throws ContractError when a mode
/// lies at or beyond the grid Nyquist frequency or the spec is malformed.
GridField render_field(const FieldSpec& spec, const TorusGrid& grid);

/// Model data on an n^d grid (n defaults to the scenario grid). Dense
/// kernels only render on the scenario grid.
ModelData render_model_data(const Scenario& scenario, std::optional<int> n = std::nullopt);

/// Full problem: model data, transformed initial condition and solver config.
/// Runs the initial-condition checks (rho0_positive, guard radius).
Problem render_problem(const Scenario& scenario, std::optional<int> n = std::nullopt);

/// Parse + schema check + rendering and every validation rule. Dense kernel
/// paths resolve against `base_dir`.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = ".");

/// Reads and parses a scenario file; throws IoError when unreadable.
Scenario load_scenario(const std::filesystem::path& path);

std::string scenario_to_json(const Scenario& scenario);

/// Writes the scenario JSON (and the dense kernel sidecar, if any, next to it).
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Runs every validation rule on the rendered scenario. Throws ValidationError.
void validate_scenario(const Scenario& scenario);

}  // namespace nlspec
