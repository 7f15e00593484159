#include "mfgdc/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "mfgdc/core/io.hpp"
#include "mfgdc/models/energy.hpp"

namespace mfgdc::cli {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

const json& require(const json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
  return v;
}

std::uint64_t count(const json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ConfigError(what + " must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(what + " must be a string");
  return j.get<std::string>();
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path;
}

std::filesystem::path existing(const std::string& p, const std::filesystem::path& base, const std::string& what) {
  auto path = resolve(p, base);
  if (!std::filesystem::exists(path)) throw ConfigError(what + " file not found: " + path.string());
  return path;
}

EndpointSpec parse_endpoint(const json& j, const std::string& where, const std::filesystem::path& base) {
  EndpointSpec e;
  if (j.is_string()) {
    if (j.get<std::string>() != "uniform") throw ConfigError(where + ": string endpoints must be \"uniform\"");
    return e;
  }
  only_keys(j, where, {"bump", "file", "random"});
  if (j.size() != 1) throw ConfigError(where + " must have exactly one of bump, file, random");
  if (j.contains("bump")) {
    const auto& b = j.at("bump");
    only_keys(b, where + ".bump", {"center", "length", "floor"});
    e.kind = EndpointSpec::Kind::bump;
    if (b.contains("center")) e.bump.center = number(b.at("center"), where + ".bump.center");
    if (b.contains("length")) e.bump.length = number(b.at("length"), where + ".bump.length");
    if (b.contains("floor")) e.bump.floor = number(b.at("floor"), where + ".bump.floor");
  } else if (j.contains("file")) {
    e.kind = EndpointSpec::Kind::file;
    e.path = existing(text(j.at("file"), where + ".file"), base, where);
  } else {
    const auto& r = j.at("random");
    only_keys(r, where + ".random", {"modes", "amplitude"});
    e.kind = EndpointSpec::Kind::random;
    if (r.contains("modes")) e.modes = static_cast<int>(count(r.at("modes"), where + ".random.modes"));
    if (r.contains("amplitude")) e.amplitude = number(r.at("amplitude"), where + ".random.amplitude");
  }
  return e;
}

CouplingSpec parse_coupling(const json& j, const std::filesystem::path& base) {
  CouplingSpec c;
  if (j.is_string()) {
    if (j.get<std::string>() != "zero") throw ConfigError("coupling: string form must be \"zero\"");
    return c;
  }
  only_keys(j, "coupling", {"power", "table"});
  if (j.size() != 1) throw ConfigError("coupling must have exactly one of power, table");
  if (j.contains("power")) {
    const auto& p = j.at("power");
    only_keys(p, "coupling.power", {"c", "theta"});
    c.kind = CouplingSpec::Kind::power;
    c.c = number(require(p, "coupling.power", "c"), "coupling.power.c");
    if (p.contains("theta")) c.theta = number(p.at("theta"), "coupling.power.theta");
  } else {
    const auto& t = j.at("table");
    only_keys(t, "coupling.table", {"path"});
    c.kind = CouplingSpec::Kind::table;
    c.path = existing(text(require(t, "coupling.table", "path"), "coupling.table.path"), base, "coupling table");
  }
  return c;
}

double parse_q(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "inf") throw ConfigError("verify.q entries must be numbers or \"inf\"");
    return std::numeric_limits<double>::infinity();
  }
  const double q = number(j, "verify.q entry");
  if (q < 1.0) throw ConfigError("verify.q entries must be >= 1");
  return q;
}

}  // namespace

RunConfig parse_config(const json& j, const std::filesystem::path& base) {
  only_keys(j, "config",
            {"grid", "time", "endpoints", "hamiltonian", "congestion", "coupling", "solver", "verify", "output", "seed"});
  RunConfig c;

  const auto& grid = require(j, "config", "grid");
  only_keys(grid, "grid", {"dim", "n"});
  c.dim = static_cast<int>(count(require(grid, "grid", "dim"), "grid.dim"));
  c.n = count(require(grid, "grid", "n"), "grid.n");

  const auto& time = require(j, "config", "time");
  only_keys(time, "time", {"T", "K"});
  c.horizon = number(require(time, "time", "T"), "time.T");
  c.steps = count(require(time, "time", "K"), "time.K");

  const auto& ends = require(j, "config", "endpoints");
  only_keys(ends, "endpoints", {"m0", "mT"});
  c.m0 = parse_endpoint(require(ends, "endpoints", "m0"), "endpoints.m0", base);
  c.mT = parse_endpoint(require(ends, "endpoints", "mT"), "endpoints.mT", base);

  if (j.contains("hamiltonian")) {
    only_keys(j.at("hamiltonian"), "hamiltonian", {"beta"});
    c.beta = number(require(j.at("hamiltonian"), "hamiltonian", "beta"), "hamiltonian.beta");
  }
  if (j.contains("congestion")) {
    only_keys(j.at("congestion"), "congestion", {"alpha"});
    c.alpha = number(require(j.at("congestion"), "congestion", "alpha"), "congestion.alpha");
  }
  if (j.contains("coupling")) c.coupling = parse_coupling(j.at("coupling"), base);

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    only_keys(s, "solver", {"backend", "max_iters", "tol", "alpha_step", "penalty"});
    if (s.contains("backend")) {
      const auto b = text(s.at("backend"), "solver.backend");
      if (b == "variational") c.solver.backend = Backend::variational;
      else if (b == "newton") c.solver.backend = Backend::newton;
      else throw ConfigError("solver.backend must be \"variational\" or \"newton\"");
    }
    if (s.contains("max_iters")) c.solver.max_iters = count(s.at("max_iters"), "solver.max_iters");
    if (s.contains("tol")) c.solver.tol_residual = number(s.at("tol"), "solver.tol");
    if (s.contains("alpha_step")) c.solver.alpha_step = number(s.at("alpha_step"), "solver.alpha_step");
    if (s.contains("penalty")) c.solver.penalty = number(s.at("penalty"), "solver.penalty");
  }

  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    only_keys(v, "verify", {"U", "q", "tolerances"});
    if (v.contains("U")) {
      if (!v.at("U").is_array()) throw ConfigError("verify.U must be an array");
      c.energies.clear();
      for (const auto& u : v.at("U")) {
        c.energies.push_back(text(u, "verify.U entry"));
        try {
          InternalEnergy::parse(c.energies.back());
        } catch (const InvalidArgument& e) {
          throw ConfigError(std::string("verify.U: ") + e.what());
        }
      }
    }
    if (v.contains("q")) {
      if (!v.at("q").is_array()) throw ConfigError("verify.q must be an array");
      c.q_list.clear();
      for (const auto& q : v.at("q")) c.q_list.push_back(parse_q(q));
    }
    if (v.contains("tolerances")) {
      const auto& t = v.at("tolerances");
      only_keys(t, "verify.tolerances", {"abs", "rel"});
      if (t.contains("abs")) c.tol_abs = number(t.at("abs"), "verify.tolerances.abs");
      if (t.contains("rel")) c.tol_rel = number(t.at("rel"), "verify.tolerances.rel");
      if (c.tol_abs < 0.0 || c.tol_rel < 0.0) throw ConfigError("verify tolerances must be >= 0");
    }
  }
  if (j.contains("output")) {
    only_keys(j.at("output"), "output", {"directory"});
    c.output = text(require(j.at("output"), "output", "directory"), "output.directory");
  }
  if (j.contains("seed")) c.seed = count(j.at("seed"), "seed");

  try {
    c.solver.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j, path.parent_path());
}

ScalarField build_endpoint(const EndpointSpec& spec, const TorusGrid& grid, std::uint64_t seed) {
  switch (spec.kind) {
    case EndpointSpec::Kind::uniform:
      return ScalarField(grid, 1.0);
    case EndpointSpec::Kind::bump:
      return bump_density(spec.bump, grid);
    case EndpointSpec::Kind::random:
      return random_smooth_density(grid, seed, spec.modes, spec.amplitude);
    case EndpointSpec::Kind::file: {
      auto f = read_field(spec.path);
      if (!(f.grid() == grid)) throw ConfigError("endpoint file " + spec.path.string() + " does not match the grid");
      return f;
    }
  }
  throw ConfigError("unknown endpoint kind");
}

Coupling build_coupling(const CouplingSpec& spec) {
  switch (spec.kind) {
    case CouplingSpec::Kind::zero:
      return Coupling::zero();
    case CouplingSpec::Kind::power:
      return Coupling::power(spec.c, spec.theta);
    case CouplingSpec::Kind::table:
      return read_coupling_csv(spec.path);
  }
  throw ConfigError("unknown coupling kind");
}

PlanningProblem build_problem(const RunConfig& c) {
  try {
    TorusGrid grid(c.dim, c.n);
    // Random endpoints draw from streams 2 seed and 2 seed + 1.
    PlanningProblem p{grid,
                      c.horizon,
                      c.steps,
                      build_endpoint(c.m0, grid, 2 * c.seed),
                      build_endpoint(c.mT, grid, 2 * c.seed + 1),
                      PowerHamiltonian(c.beta),
                      build_coupling(c.coupling),
                      c.alpha};
    p.validate();
    return p;
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace mfgdc::cli
