#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfgdc/core/error.hpp"
#include "mfgdc/oracle/oracle.hpp"
#include "mfgdc/solver/problem.hpp"

namespace mfgdc::cli {

/// Malformed or inconsistent run configuration (exit code 4).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct EndpointSpec {
  enum class Kind { uniform, bump, file, random };
  Kind kind = Kind::uniform;
  BumpSpec bump;
  std::filesystem::path path;
  int modes = 3;
  double amplitude = 0.5;
};

struct CouplingSpec {
  enum class Kind { zero, power, table };
  Kind kind = Kind::zero;
  double c = 0.0;
  double theta = 1.0;
  std::filesystem::path path;
};

struct RunConfig {
  int dim = 1;
  std::size_t n = 64;
  double horizon = 1.0;
  std::size_t steps = 32;
  EndpointSpec m0, mT;
  double beta = 2.0;
  double alpha = 0.0;
  CouplingSpec coupling;
  SolverParams solver;
  std::vector<std::string> energies{"power:2"};
  std::vector<double> q_list{1.0, 2.0};
  double tol_abs = 1e-10;
  double tol_rel = 1e-3;
  std::filesystem::path output = "mfgdc_out";
  std::uint64_t seed = 0;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigError. Relative input paths resolve against base_dir, the output
/// directory against the working directory.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

ScalarField build_endpoint(const EndpointSpec& spec, const TorusGrid& grid, std::uint64_t seed);
Coupling build_coupling(const CouplingSpec& spec);
/// Builds and validates the planning problem; precondition failures are
/// rethrown as ConfigError.
PlanningProblem build_problem(const RunConfig& config);

}  // namespace mfgdc::cli
