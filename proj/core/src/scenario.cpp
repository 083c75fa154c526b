#include "nlspec/scenario.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nlspec/rules.hpp"

namespace nlspec {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- schema helpers -------------------------------------------------------

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(join(path, key), "required field is missing");
  return *it;
}

void expect_object(const json& j, const std::string& path, std::set<std::string> allowed) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw SchemaError(join(path, key), "unknown field");
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

double number_at(const json& obj, const std::string& path, const std::string& key) {
  return as_number(require(obj, path, key), join(path, key));
}

double number_or(const json& obj, const std::string& path, const std::string& key, double dflt) {
  return obj.contains(key) ? as_number(obj.at(key), join(path, key)) : dflt;
}

std::vector<double> number_array(const json& j, const std::string& path, std::size_t len) {
  if (!j.is_array() || j.size() != len)
    throw SchemaError(path, "expected an array of " + std::to_string(len) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < len; ++i)
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// ---- field specs ----------------------------------------------------------

FieldSpec parse_field(const json& j, const std::string& path, int dim) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const std::string type = as_string(require(j, path, "type"), join(path, "type"));
  if (type == "constant") {
    expect_object(j, path, {"type", "value"});
    return ConstantSpec{number_at(j, path, "value")};
  }
  if (type == "modes") {
    expect_object(j, path, {"type", "offset", "modes"});
    ModesSpec s;
    s.offset = number_or(j, path, "offset", 0.0);
    const json& modes = require(j, path, "modes");
    const std::string mpath = join(path, "modes");
    if (!modes.is_array()) throw SchemaError(mpath, "expected an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const std::string ipath = mpath + "[" + std::to_string(i) + "]";
      expect_object(modes[i], ipath, {"k", "amplitude", "phase"});
      const json& k = require(modes[i], ipath, "k");
      const std::string kpath = join(ipath, "k");
      if (!k.is_array() || static_cast<int>(k.size()) != dim)
        throw SchemaError(kpath, "expected " + std::to_string(dim) + " integer wavenumbers");
      ModeTerm t;
      for (int a = 0; a < dim; ++a) t.k[a] = as_int(k[a], kpath + "[" + std::to_string(a) + "]");
      t.amplitude = number_at(modes[i], ipath, "amplitude");
      t.phase = number_or(modes[i], ipath, "phase", 0.0);
      s.modes.push_back(t);
    }
    return s;
  }
  if (type == "gaussian-bump") {
    expect_object(j, path, {"type", "center", "width", "height", "baseline"});
    GaussianBumpSpec s;
    const auto c = number_array(require(j, path, "center"), join(path, "center"), dim);
    for (int a = 0; a < dim; ++a) s.center[a] = c[a];
    s.width = number_at(j, path, "width");
    if (!(s.width > 0.0)) throw SchemaError(join(path, "width"), "must be positive");
    s.height = number_at(j, path, "height");
    s.baseline = number_or(j, path, "baseline", 0.0);
    return s;
  }
  throw SchemaError(join(path, "type"), "unknown field type '" + type + "'");
}

json field_to_json(const FieldSpec& spec, int dim) {
  json j;
  if (const auto* c = std::get_if<ConstantSpec>(&spec)) {
    j["type"] = "constant";
    j["value"] = c->value;
  } else if (const auto* m = std::get_if<ModesSpec>(&spec)) {
    j["type"] = "modes";
    j["offset"] = m->offset;
    j["modes"] = json::array();
    for (const ModeTerm& t : m->modes) {
      json k = json::array();
      for (int a = 0; a < dim; ++a) k.push_back(t.k[a]);
      j["modes"].push_back({{"k", k}, {"amplitude", t.amplitude}, {"phase", t.phase}});
    }
  } else {
    const auto& g = std::get<GaussianBumpSpec>(spec);
    j["type"] = "gaussian-bump";
    json c = json::array();
    for (int a = 0; a < dim; ++a) c.push_back(g.center[a]);
    j["center"] = c;
    j["width"] = g.width;
    j["height"] = g.height;
    j["baseline"] = g.baseline;
  }
  return j;
}

// Periodized Gaussian: image shells |j|_inf = r are added until a whole shell
// contributes less than 1e-15 relative to the height.
double gaussian_value(const GaussianBumpSpec& g, int dim, const double* x) {
  const double inv = 1.0 / (2.0 * g.width * g.width);
  double d[2] = {0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    d[a] = x[a] - g.center[a];
    d[a] -= std::round(d[a]);  // nearest image first, |d| <= 1/2
  }
  double sum = 0.0;
  for (int r = 0;; ++r) {
    double shell = 0.0;
    if (dim == 1) {
      for (int j : {-r, r}) {
        shell += std::exp(-(d[0] + j) * (d[0] + j) * inv);
        if (r == 0) break;
      }
    } else {
      for (int j0 = -r; j0 <= r; ++j0)
        for (int j1 = -r; j1 <= r; ++j1) {
          if (std::max(std::abs(j0), std::abs(j1)) != r) continue;
          const double a = d[0] + j0;
          const double b = d[1] + j1;
          shell += std::exp(-(a * a + b * b) * inv);
        }
    }
    sum += shell;
    if (r > 0 && shell < 1e-15) break;
  }
  return g.baseline + g.height * sum;
}

// ---- dense kernel sidecar -------------------------------------------------

std::vector<double> read_sidecar(const fs::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dense kernel file " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != count * 8)
    throw SchemaError("kernel.path", "dense kernel file " + path.string() + " holds " +
                                         std::to_string(bytes) + " bytes, expected " +
                                         std::to_string(count * 8));
  in.seekg(0);
  std::vector<double> out(count);
  std::vector<unsigned char> raw(bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t u = 0;
    for (int b = 7; b >= 0; --b) u = (u << 8) | raw[i * 8 + b];
    out[i] = std::bit_cast<double>(u);
  }
  return out;
}

void write_sidecar(const fs::path& path, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dense kernel file " + path.string());
  for (double v : values) {
    auto u = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i, u >>= 8) b[i] = static_cast<unsigned char>(u & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
  }
  if (!out) throw IoError("failed writing dense kernel file " + path.string());
}

KernelSpec parse_kernel(const json& j, int dim, int n, const fs::path& base_dir) {
  const std::string path = "kernel";
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const std::string type = as_string(require(j, path, "type"), "kernel.type");
  if (type == "uniform") {
    expect_object(j, path, {"type"});
    return UniformKernelSpec{};
  }
  if (type == "separable") {
    expect_object(j, path, {"type", "a", "b"});
    return SeparableKernelSpec{parse_field(require(j, path, "a"), "kernel.a", dim),
                               parse_field(require(j, path, "b"), "kernel.b", dim)};
  }
  if (type == "dense") {
    expect_object(j, path, {"type", "path"});
    DenseKernelSpec s;
    s.path = as_string(require(j, path, "path"), "kernel.path");
    std::size_t points = 1;
    for (int a = 0; a < dim; ++a) points *= static_cast<std::size_t>(n);
    if (points > TransferKernel::kMaxDensePoints)
      throw SchemaError("kernel.type", "dense kernels are limited to " +
                                           std::to_string(TransferKernel::kMaxDensePoints) +
                                           " grid points");
    const fs::path file = fs::path(s.path).is_absolute() ? fs::path(s.path) : base_dir / s.path;
    s.values = read_sidecar(file, points * points);
    return s;
  }
  throw SchemaError("kernel.type", "unknown kernel type '" + type + "'");
}

StepPolicy parse_dt(const json& j) {
  const std::string path = "solver.dt";
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const std::string policy = as_string(require(j, path, "policy"), "solver.dt.policy");
  if (policy == "fixed") {
    expect_object(j, path, {"policy", "dt"});
    const double dt = number_at(j, path, "dt");
    if (!(dt > 0.0)) throw SchemaError("solver.dt.dt", "must be positive");
    return FixedStep{dt};
  }
  if (policy == "auto") {
    expect_object(j, path, {"policy", "safety"});
    const double s = number_or(j, path, "safety", 0.5);
    if (!(s > 0.0 && s <= 1.0)) throw SchemaError("solver.dt.safety", "must lie in (0, 1]");
    return AutoStep{s};
  }
  throw SchemaError("solver.dt.policy", "expected 'fixed' or 'auto'");
}

SolverConfig parse_solver(const json& j) {
  const std::string path = "solver";
  expect_object(j, path,
                {"epsilon", "dt", "t_end", "guard_K", "guard_m", "record_every", "dealias",
                 "rhs_path"});
  SolverConfig c;
  c.epsilon = number_at(j, path, "epsilon");
  if (!(c.epsilon >= 0.0)) throw SchemaError("solver.epsilon", "must be nonnegative");
  c.t_end = number_at(j, path, "t_end");
  if (!(c.t_end > 0.0)) throw SchemaError("solver.t_end", "must be positive");
  if (j.contains("dt")) c.dt_policy = parse_dt(j.at("dt"));
  if (j.contains("guard_K")) {
    c.guard_radius = as_number(j.at("guard_K"), "solver.guard_K");
    if (!(c.guard_radius > 0.0)) throw SchemaError("solver.guard_K", "must be positive");
  }
  if (j.contains("guard_m")) {
    c.guard_m = as_int(j.at("guard_m"), "solver.guard_m");
    if (c.guard_m < 1 || c.guard_m > kMaxDerivativeOrder)
      throw SchemaError("solver.guard_m",
                        "must lie in [1, " + std::to_string(kMaxDerivativeOrder) + "]");
  }
  if (j.contains("record_every")) {
    c.record_every = as_int(j.at("record_every"), "solver.record_every");
    if (c.record_every < 1) throw SchemaError("solver.record_every", "must be >= 1");
  }
  if (j.contains("dealias")) {
    if (!j.at("dealias").is_boolean()) throw SchemaError("solver.dealias", "expected a boolean");
    c.rhs.dealias = j.at("dealias").get<bool>();
  }
  if (j.contains("rhs_path")) {
    const std::string p = as_string(j.at("rhs_path"), "solver.rhs_path");
    if (p == "direct")
      c.rhs.path = RhsPath::direct;
    else if (p == "expanded")
      c.rhs.path = RhsPath::expanded;
    else
      throw SchemaError("solver.rhs_path", "expected 'direct' or 'expanded'");
  }
  return c;
}

StudySpec parse_studies(const json& j) {
  const std::string path = "studies";
  expect_object(j, path, {"epsilon_ladder", "m_prime", "resolution_n2"});
  StudySpec s;
  if (j.contains("epsilon_ladder")) {
    const json& l = j.at("epsilon_ladder");
    if (!l.is_array()) throw SchemaError("studies.epsilon_ladder", "expected an array");
    for (std::size_t i = 0; i < l.size(); ++i)
      s.epsilon_ladder.push_back(
          as_number(l[i], "studies.epsilon_ladder[" + std::to_string(i) + "]"));
  }
  if (j.contains("m_prime")) s.m_prime = as_int(j.at("m_prime"), "studies.m_prime");
  if (j.contains("resolution_n2"))
    s.resolution_n2 = as_int(j.at("resolution_n2"), "studies.resolution_n2");
  return s;
}

TransferKernel render_kernel(const Scenario& sc, const TorusGrid& grid) {
  if (std::holds_alternative<UniformKernelSpec>(sc.kernel)) return TransferKernel::uniform(grid);
  if (const auto* s = std::get_if<SeparableKernelSpec>(&sc.kernel))
    return kernel_normalize(
        TransferKernel::separable(render_field(s->a, grid), render_field(s->b, grid)));
  const auto& d = std::get<DenseKernelSpec>(sc.kernel);
  if (grid.n() != sc.n)
    throw ContractError("dense kernels render only on the scenario grid (n = " +
                        std::to_string(sc.n) + ")");
  return kernel_normalize(TransferKernel::dense(grid, d.values));
}

}  // namespace

GridField render_field(const FieldSpec& spec, const TorusGrid& grid) {
  const std::size_t size = grid.size();
  const int dim = grid.dim();
  std::vector<double> v(size);
  if (const auto* c = std::get_if<ConstantSpec>(&spec)) {
    std::fill(v.begin(), v.end(), c->value);
  } else if (const auto* m = std::get_if<ModesSpec>(&spec)) {
    for (const ModeTerm& t : m->modes)
      for (int a = 0; a < dim; ++a)
        if (2 * std::abs(t.k[a]) >= grid.n())
          throw ContractError("render_field: mode k = " + std::to_string(t.k[a]) +
                              " is not below the grid Nyquist frequency " +
                              std::to_string(grid.n() / 2));
    for (std::size_t i = 0; i < size; ++i) {
      double x[2] = {grid.coordinate(i, 0), dim == 2 ? grid.coordinate(i, 1) : 0.0};
      double s = m->offset;
      for (const ModeTerm& t : m->modes) {
        double kx = t.k[0] * x[0];
        if (dim == 2) kx += t.k[1] * x[1];
        s += t.amplitude * std::cos(kTwoPi * kx + t.phase);
      }
      v[i] = s;
    }
  } else {
    const auto& g = std::get<GaussianBumpSpec>(spec);
    if (!(g.width > 0.0)) throw ContractError("render_field: gaussian width must be positive");
    for (std::size_t i = 0; i < size; ++i) {
      const double x[2] = {grid.coordinate(i, 0), dim == 2 ? grid.coordinate(i, 1) : 0.0};
      v[i] = gaussian_value(g, dim, x);
    }
  }
  return GridField(grid, std::move(v));
}

ModelData render_model_data(const Scenario& sc, std::optional<int> n) {
  const TorusGrid grid(sc.dim, n.value_or(sc.n));
  ModelParams params(sc.delta, sc.u_plus, sc.u_minus, sc.rho_tilde);
  return ModelData(render_field(sc.kappa, grid), render_field(sc.eta, grid),
                   render_field(sc.omega, grid), render_field(sc.gamma, grid),
                   render_kernel(sc, grid), params);
}

Problem render_problem(const Scenario& sc, std::optional<int> n) {
  ModelData data = render_model_data(sc, n);
  const GridField rho0 = render_field(sc.rho0, data.grid());
  const double lo = min_value(rho0);
  if (!(lo > 0.0))
    throw ValidationError(std::string(rules::kRho0Positive), "rho0",
                          "minimum " + num(lo) + " is not positive");
  SpectralField rho_hat = forward_transform(rho0);
  const int m = sc.solver.sobolev_index(sc.dim);
  const double norm = sobolev_norm(rho_hat, m);
  if (!(sc.solver.guard_radius > norm))
    throw ValidationError(std::string(rules::kGuardRadius), "solver.guard_K",
                          "K = " + num(sc.solver.guard_radius) + " does not exceed ||rho0||_{H^" +
                              std::to_string(m) + "} = " + num(norm));
  return Problem{std::move(data), std::move(rho_hat), sc.solver};
}

void validate_scenario(const Scenario& sc) { (void)render_problem(sc); }

Scenario parse_scenario(const std::string& text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what(), e.byte);
  }
  expect_object(root, "",
                {"schema_version", "grid", "params", "fields", "kernel", "solver", "studies",
                 "output_dir"});
  const int version = as_int(require(root, "", "schema_version"), "schema_version");
  if (version != kScenarioSchemaVersion)
    throw SchemaError("schema_version", "unsupported version " + std::to_string(version));

  Scenario sc;
  const json& grid = require(root, "", "grid");
  expect_object(grid, "grid", {"dim", "n"});
  sc.dim = as_int(require(grid, "grid", "dim"), "grid.dim");
  sc.n = as_int(require(grid, "grid", "n"), "grid.n");
  if (sc.dim != 1 && sc.dim != 2) throw SchemaError("grid.dim", "must be 1 or 2");
  if (sc.n < 8 || (sc.n & (sc.n - 1)) != 0)
    throw SchemaError("grid.n", "must be a power of two >= 8");

  const json& params = require(root, "", "params");
  expect_object(params, "params", {"delta", "u_plus", "u_minus", "rho_tilde"});
  sc.delta = number_at(params, "params", "delta");
  sc.u_plus = number_at(params, "params", "u_plus");
  sc.u_minus = number_at(params, "params", "u_minus");
  sc.rho_tilde = number_at(params, "params", "rho_tilde");

  const json& fields = require(root, "", "fields");
  expect_object(fields, "fields", {"kappa", "eta", "omega", "gamma", "rho0"});
  sc.kappa = parse_field(require(fields, "fields", "kappa"), "fields.kappa", sc.dim);
  sc.eta = parse_field(require(fields, "fields", "eta"), "fields.eta", sc.dim);
  sc.omega = parse_field(require(fields, "fields", "omega"), "fields.omega", sc.dim);
  sc.gamma = parse_field(require(fields, "fields", "gamma"), "fields.gamma", sc.dim);
  sc.rho0 = parse_field(require(fields, "fields", "rho0"), "fields.rho0", sc.dim);

  sc.kernel = parse_kernel(require(root, "", "kernel"), sc.dim, sc.n, base_dir);
  sc.solver = parse_solver(require(root, "", "solver"));
  if (root.contains("studies")) sc.studies = parse_studies(root.at("studies"));
  if (root.contains("output_dir")) sc.output_dir = as_string(root.at("output_dir"), "output_dir");

  validate_scenario(sc);
  return sc;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::string scenario_to_json(const Scenario& sc) {
  json root;
  root["schema_version"] = kScenarioSchemaVersion;
  root["grid"] = {{"dim", sc.dim}, {"n", sc.n}};
  root["params"] = {{"delta", sc.delta},
                    {"u_plus", sc.u_plus},
                    {"u_minus", sc.u_minus},
                    {"rho_tilde", sc.rho_tilde}};
  root["fields"] = {{"kappa", field_to_json(sc.kappa, sc.dim)},
                    {"eta", field_to_json(sc.eta, sc.dim)},
                    {"omega", field_to_json(sc.omega, sc.dim)},
                    {"gamma", field_to_json(sc.gamma, sc.dim)},
                    {"rho0", field_to_json(sc.rho0, sc.dim)}};
  if (std::holds_alternative<UniformKernelSpec>(sc.kernel)) {
    root["kernel"] = {{"type", "uniform"}};
  } else if (const auto* s = std::get_if<SeparableKernelSpec>(&sc.kernel)) {
    root["kernel"] = {{"type", "separable"},
                      {"a", field_to_json(s->a, sc.dim)},
                      {"b", field_to_json(s->b, sc.dim)}};
  } else {
    root["kernel"] = {{"type", "dense"}, {"path", std::get<DenseKernelSpec>(sc.kernel).path}};
  }

  json solver;
  solver["epsilon"] = sc.solver.epsilon;
  if (const auto* f = std::get_if<FixedStep>(&sc.solver.dt_policy))
    solver["dt"] = {{"policy", "fixed"}, {"dt", f->dt}};
  else
    solver["dt"] = {{"policy", "auto"}, {"safety", std::get<AutoStep>(sc.solver.dt_policy).safety}};
  solver["t_end"] = sc.solver.t_end;
  if (std::isfinite(sc.solver.guard_radius)) solver["guard_K"] = sc.solver.guard_radius;
  if (sc.solver.guard_m > 0) solver["guard_m"] = sc.solver.guard_m;
  solver["record_every"] = sc.solver.record_every;
  solver["dealias"] = sc.solver.rhs.dealias;
  solver["rhs_path"] = sc.solver.rhs.path == RhsPath::direct ? "direct" : "expanded";
  root["solver"] = solver;

  json studies = json::object();
  if (!sc.studies.epsilon_ladder.empty()) studies["epsilon_ladder"] = sc.studies.epsilon_ladder;
  if (sc.studies.m_prime) studies["m_prime"] = *sc.studies.m_prime;
  if (sc.studies.resolution_n2) studies["resolution_n2"] = *sc.studies.resolution_n2;
  if (!studies.empty()) root["studies"] = studies;
  root["output_dir"] = sc.output_dir;
  return root.dump(2) + "\n";
}

void save_scenario(const Scenario& sc, const fs::path& path) {
  if (const auto* d = std::get_if<DenseKernelSpec>(&sc.kernel)) {
    const fs::path rel(d->path);
    write_sidecar(rel.is_absolute() ? rel : path.parent_path() / rel, d->values);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write scenario file " + path.string());
  out << scenario_to_json(sc);
  if (!out) throw IoError("failed writing scenario file " + path.string());
}

}  // namespace nlspec
