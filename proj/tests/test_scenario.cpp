#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "nlspec/errors.hpp"
#include "nlspec/outputs.hpp"
#include "nlspec/rules.hpp"
#include "nlspec/scenario.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace nlspec;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

constexpr const char* kMinimal = R"({
  "schema_version": 1,
  "grid": {"dim": 1, "n": 16},
  "params": {"delta": 0.1, "u_plus": 0.9, "u_minus": 0.5, "rho_tilde": 1.0},
  "fields": {
    "kappa": {"type": "constant", "value": 0.5},
    "eta": {"type": "constant", "value": 0.1},
    "omega": {"type": "constant", "value": 0.1},
    "gamma": {"type": "constant", "value": 0.2},
    "rho0": {"type": "modes", "offset": 1.0, "modes": [{"k": [1], "amplitude": 0.2, "phase": 0.0}]}
  },
  "kernel": {"type": "uniform"},
  "solver": {"epsilon": 0.05, "t_end": 0.1}
})";

nlohmann::json minimal() { return nlohmann::json::parse(kMinimal); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nlspec_test_scenario" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string rule_of(const nlohmann::json& j) {
  try {
    parse_scenario(j.dump());
  } catch (const ValidationError& e) {
    return e.rule();
  }
  return "none";
}

std::string rule_of(const Scenario& sc) {
  try {
    render_problem(sc);
  } catch (const ValidationError& e) {
    return e.rule();
  }
  return "none";
}

TEST(Parse, MinimalScenarioAndDefaults) {
  const Scenario sc = parse_scenario(kMinimal);
  EXPECT_EQ(sc.dim, 1);
  EXPECT_EQ(sc.n, 16);
  EXPECT_DOUBLE_EQ(sc.u_minus, 0.5);
  EXPECT_TRUE(std::holds_alternative<UniformKernelSpec>(sc.kernel));
  EXPECT_TRUE(std::holds_alternative<AutoStep>(sc.solver.dt_policy));
  EXPECT_TRUE(std::isinf(sc.solver.guard_radius));
  EXPECT_EQ(sc.solver.sobolev_index(1), 5);
  EXPECT_EQ(sc.output_dir, "out");
  const auto& rho0 = std::get<ModesSpec>(sc.rho0);
  ASSERT_EQ(rho0.modes.size(), 1u);
  EXPECT_EQ(rho0.modes[0].k, (WaveVector{1, 0}));
}

TEST(Parse, MalformedJsonReportsPosition) {
  const std::string text = R"({"schema_version": 1, "grid": {"dim": 1,, "n": 16}})";
  try {
    parse_scenario(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), text.find(",,") + 2);
  }
}

TEST(Parse, SchemaErrorsCarryFieldPath) {
  auto path_of = [](const nlohmann::json& j) -> std::string {
    try {
      parse_scenario(j.dump());
    } catch (const SchemaError& e) {
      return e.path();
    }
    return "none";
  };
  nlohmann::json j = minimal();
  j["params"].erase("rho_tilde");
  EXPECT_EQ(path_of(j), "params.rho_tilde");

  j = minimal();
  j["solver"]["bogus"] = 1;
  EXPECT_EQ(path_of(j), "solver.bogus");

  j = minimal();
  j["fields"]["eta"]["type"] = "spline";
  EXPECT_EQ(path_of(j).rfind("fields.eta", 0), 0u);

  j = minimal();
  j["schema_version"] = 2;
  EXPECT_EQ(path_of(j), "schema_version");

  j = minimal();
  j["params"]["delta"] = "0.1";
  EXPECT_EQ(path_of(j), "params.delta");
}

TEST(Validation, EveryRuleIsReachableAndNamedOnce) {
  std::set<std::string> seen;
  auto expect = [&](std::string_view rule, const nlohmann::json& j) {
    EXPECT_EQ(rule_of(j), rule);
    seen.insert(std::string(rule));
  };
  auto with = [](auto mutate) {
    nlohmann::json j = minimal();
    mutate(j);
    return j;
  };
  expect(rules::kDeltaPositive, with([](auto& j) { j["params"]["delta"] = 0.0; }));
  expect(rules::kUMinusPositive, with([](auto& j) { j["params"]["u_minus"] = -0.1; }));
  expect(rules::kUMinusBelowUPlus, with([](auto& j) { j["params"]["u_minus"] = 0.95; }));
  expect(rules::kUPlusBelowOne, with([](auto& j) { j["params"]["u_plus"] = 1.0; }));
  expect(rules::kRhoTildePositive, with([](auto& j) { j["params"]["rho_tilde"] = 0.0; }));
  expect(rules::kKappaUnitInterval, with([](auto& j) { j["fields"]["kappa"]["value"] = 1.2; }));
  expect(rules::kEtaNonnegative, with([](auto& j) { j["fields"]["eta"]["value"] = -0.1; }));
  expect(rules::kOmegaNonnegative, with([](auto& j) { j["fields"]["omega"]["value"] = -0.1; }));
  expect(rules::kGammaNonnegative, with([](auto& j) { j["fields"]["gamma"]["value"] = -0.1; }));
  expect(rules::kRho0Positive, with([](auto& j) { j["fields"]["rho0"]["offset"] = 0.1; }));
  expect(rules::kGuardRadius, with([](auto& j) { j["solver"]["guard_K"] = 0.5; }));

  const TorusGrid g(1, 16);
  Scenario sc = parse_scenario(kMinimal);
  std::vector<double> neg(g.size() * g.size(), 1.0);
  neg[7] = -1.0;
  sc.kernel = DenseKernelSpec{"k.bin", neg};
  EXPECT_EQ(rule_of(sc), rules::kTauNonnegative);
  seen.insert(std::string(rules::kTauNonnegative));
  sc.kernel = SeparableKernelSpec{ConstantSpec{0.0}, ConstantSpec{1.0}};
  EXPECT_EQ(rule_of(sc), rules::kTauRowsNormalizable);
  seen.insert(std::string(rules::kTauRowsNormalizable));

  EXPECT_EQ(seen.size(), rules::kAll.size());
  for (std::string_view r : rules::kAll) EXPECT_TRUE(seen.contains(std::string(r))) << r;
  EXPECT_EQ(rule_of(minimal()), "none");
}

TEST(Validation, KappaViolationNamesField) {
  nlohmann::json j = minimal();
  j["fields"]["kappa"] = {{"type", "modes"}, {"offset", 0.9}, {"modes", {{{"k", {1}}, {"amplitude", 0.3}, {"phase", 0.0}}}}};
  try {
    parse_scenario(j.dump());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.rule(), rules::kKappaUnitInterval);
    EXPECT_EQ(e.field(), "kappa");
  }
}

TEST(Render, ConstantAndModes) {
  const TorusGrid g(2, 16);
  const GridField c = render_field(ConstantSpec{0.7}, g);
  for (double v : c.values()) EXPECT_EQ(v, 0.7);
  const GridField m = render_field(fixtures::modes(1.0, {{{1, 2}, 0.5, 0.3}}), g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coordinate(i, 0), y = g.coordinate(i, 1);
    EXPECT_NEAR(m[i], 1.0 + 0.5 * std::cos(2 * kPi * (x + 2 * y) + 0.3), 1e-15);
  }
  EXPECT_THROW(render_field(fixtures::modes(1.0, {{{8, 0}, 0.1, 0.0}}), g), ContractError);
}

TEST(Render, GaussianBumpMatchesWideImageSum) {
  for (int dim : {1, 2}) {
    const TorusGrid g(dim, 32);
    const GaussianBumpSpec spec{{0.9, 0.2}, 0.35, 2.0, 0.1};
    const GridField got = render_field(spec, g);
    const int R = 12;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double s = 0.0;
      for (int a = -R; a <= R; ++a)
        for (int b = (dim == 2 ? -R : 0); b <= (dim == 2 ? R : 0); ++b) {
          const double dx = g.coordinate(i, 0) - spec.center[0] + a;
          const double dy = dim == 2 ? g.coordinate(i, 1) - spec.center[1] + b : 0.0;
          s += std::exp(-(dx * dx + dy * dy) / (2 * spec.width * spec.width));
        }
      EXPECT_NEAR(got[i], spec.baseline + spec.height * s, 1e-14) << "dim " << dim << " i " << i;
    }
  }
}

TEST(Render, ProblemOnOtherGridAndDenseRestriction) {
  const Scenario sc = fixtures::generic_1d(64);
  const Problem fine = render_problem(sc, 128);
  EXPECT_EQ(fine.data.grid().n(), 128);
  EXPECT_EQ(fine.rho0.grid().n(), 128);
  Scenario dense = parse_scenario(kMinimal);
  dense.kernel = DenseKernelSpec{"k.bin", std::vector<double>(256, 1.0)};
  EXPECT_NO_THROW(render_problem(dense));
  EXPECT_THROW(render_problem(dense, 32), ContractError);
}

TEST(RoundTrip, SaveLoadPreservesRenderedProblem) {
  const fs::path dir = scratch("roundtrip");
  Scenario sc = fixtures::generic_1d(16);
  std::vector<double> values(256);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = 0.5 + std::sin(0.37 * double(i)) * 0.25 + 1e-17 * i;
  sc.kernel = DenseKernelSpec{"kernel.bin", values};
  sc.studies.epsilon_ladder = {0.2, 0.1};
  sc.studies.m_prime = 3;
  save_scenario(sc, dir / "s.json");
  EXPECT_EQ(fs::file_size(dir / "kernel.bin"), 256u * 8u);

  const Scenario back = load_scenario(dir / "s.json");
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(sc));
  EXPECT_EQ(std::get<DenseKernelSpec>(back.kernel).values, values);
  EXPECT_EQ(back.studies.epsilon_ladder, sc.studies.epsilon_ladder);

  const Problem a = render_problem(sc), b = render_problem(back);
  for (std::size_t i = 0; i < a.rho0.size(); ++i) EXPECT_EQ(a.rho0[i], b.rho0[i]);
  EXPECT_EQ(a.data.kappa().values(), b.data.kappa().values());
  EXPECT_EQ(a.data.tau().row_integrals(), b.data.tau().row_integrals());

  fs::resize_file(dir / "kernel.bin", 100);
  EXPECT_THROW(load_scenario(dir / "s.json"), SchemaError);
  fs::remove(dir / "kernel.bin");
  EXPECT_THROW(load_scenario(dir / "s.json"), IoError);
  EXPECT_THROW(load_scenario(dir / "missing.json"), IoError);
}

TEST(ShippedScenarios, AllLoad) {
  int count = 0;
  for (const auto& e : fs::directory_iterator(NLSPEC_SCENARIO_DIR)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(render_problem(load_scenario(e.path()))) << e.path();
    ++count;
  }
  EXPECT_GE(count, 3);
}

TEST(Outputs, TimeseriesAndSummary) {
  const fs::path dir = scratch("outputs");
  const Problem pr = render_problem(fixtures::generic_1d(32));
  const Trajectory traj = integrate(pr);
  ReportBundle report = build_run_report(traj, pr.data);
  report.command = "simulate";
  write_outputs(traj, report, dir / "run", true);

  std::ifstream ts(dir / "run" / "timeseries.csv");
  std::string line;
  std::getline(ts, line);
  EXPECT_EQ(line, "t,mass,min_rho,max_rho,energy_m,sup_rhs,dt");
  std::size_t row = 0;
  while (std::getline(ts, line)) {
    ASSERT_LT(row, traj.records.size());
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    ASSERT_EQ(cells.size(), 7u);
    const Record& r = traj.records[row];
    EXPECT_EQ(cells[0], r.t);
    // Mass is the grid quadrature of rho, recomputed independently.
    EXPECT_NEAR(cells[1], integral(inverse_transform(r.rho)), 1e-14);
    EXPECT_EQ(cells[2], min_value(inverse_transform(r.rho)));
    ++row;
  }
  EXPECT_EQ(row, traj.records.size());
  EXPECT_TRUE(fs::exists(dir / "run" / ("snapshot_" + std::to_string(row - 1) + ".csv")));

  const auto summary = nlohmann::json::parse(slurp(dir / "run" / "summary.json"));
  EXPECT_EQ(summary["command"], "simulate");
  EXPECT_EQ(summary["terminal_status"]["kind"], "completed");
  std::set<std::string> names;
  for (const auto& a : summary["audits"]) {
    names.insert(a["name"].get<std::string>());
    EXPECT_TRUE(a.contains("tolerance"));
    EXPECT_EQ(a["verdict"], "pass") << a.dump();
  }
  EXPECT_EQ(names, (std::set<std::string>{"energy_envelope", "mass_balance", "lower_bound",
                                          "nonlocal_cancellation"}));
  EXPECT_TRUE(summary["metrics"].contains("k_star"));
}

TEST(Outputs, RerunIsByteIdentical) {
  const fs::path dir = scratch("rerun");
  const Problem pr = render_problem(fixtures::generic_1d(32));
  for (int i = 0; i < 2; ++i) {
    const Trajectory traj = integrate(pr);
    write_outputs(traj, build_run_report(traj, pr.data), dir / std::to_string(i));
  }
  EXPECT_EQ(slurp(dir / "0" / "timeseries.csv"), slurp(dir / "1" / "timeseries.csv"));
  EXPECT_EQ(slurp(dir / "0" / "summary.json"), slurp(dir / "1" / "summary.json"));
}

TEST(Outputs, SteadyRunHasConstantColumns) {
  const fs::path dir = scratch("steady");
  const Problem pr = render_problem(load_scenario(fs::path(NLSPEC_SCENARIO_DIR) / "steady_1d.json"));
  const Trajectory traj = integrate(pr);
  write_outputs(traj, build_run_report(traj, pr.data), dir);
  std::ifstream ts(dir / "timeseries.csv");
  std::string line;
  std::getline(ts, line);
  while (std::getline(ts, line)) {
    std::stringstream ss(line);
    std::string t, mass, lo, hi;
    std::getline(ss, t, ',');
    std::getline(ss, mass, ',');
    std::getline(ss, lo, ',');
    std::getline(ss, hi, ',');
    EXPECT_NEAR(std::stod(mass), 0.8, 1e-15);
    EXPECT_NEAR(std::stod(lo), 0.8, 1e-15);
    EXPECT_NEAR(std::stod(hi), 0.8, 1e-15);
  }
}

TEST(Outputs, UnwritableDirectoryIsIoError) {
  const fs::path dir = scratch("blocked");
  std::ofstream(dir / "file") << "x";
  const Problem pr = render_problem(fixtures::steady_1d());
  const Trajectory traj = integrate(pr);
  EXPECT_THROW(write_outputs(traj, build_run_report(traj, pr.data), dir / "file" / "sub"), IoError);
}

}  // namespace
