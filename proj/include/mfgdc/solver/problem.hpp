#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mfgdc/core/error.hpp"
#include "mfgdc/core/field.hpp"
#include "mfgdc/core/trajectory.hpp"
#include "mfgdc/models/coupling.hpp"
#include "mfgdc/models/hamiltonian.hpp"

namespace mfgdc {

/// Planning problem: find (m, u) on [0,T] x T^d with
///   -u_t + m^{alpha(1-beta)} H(Du) = g(m),
///   m_t - div(m^{1+alpha(1-beta)} D_pH(Du)) = 0,
///   m(0) = m0, m(T) = mT.
struct PlanningProblem {
  TorusGrid grid;
  double horizon;
  std::size_t steps;
  ScalarField m0;
  ScalarField mT;
  PowerHamiltonian hamiltonian;
  Coupling coupling;
  double alpha = 0.0;

  /// Throws InvalidArgument on violated invariants (mass 1 within 1e-10,
  /// nonnegative endpoints, positive endpoints when alpha > 0, K >= 2).
  void validate() const;
  double dt() const noexcept { return horizon / static_cast<double>(steps); }
  /// alpha (1 - beta)
  double gamma() const noexcept { return alpha * (1.0 - hamiltonian.beta()); }
};

enum class Backend { variational, newton };

struct SolverParams {
  Backend backend = Backend::variational;
  std::size_t max_iters = 20000;
  double tol_residual = 1e-5;
  /// Augmented-Lagrangian penalty of the variational backend.
  double penalty = 1.0;
  /// Iterations between residual evaluations (variational).
  std::size_t check_every = 10;
  /// Continuation step in alpha (newton).
  double alpha_step = 0.25;
  double min_alpha_step = 1.0 / 256.0;
  /// Smallest line-search damping before a Newton step counts as failed.
  double min_damping = 1.0 / 1024.0;
  std::size_t newton_max_iters = 60;
  /// Densities below this are treated as vacuum in residuals and velocity
  /// reconstruction.
  double eps_m = 1e-12;

  void validate() const;
};

struct SolveDiagnostics {
  std::string backend;
  std::size_t iterations = 0;
  double energy = 0.0;
  std::vector<double> residual_history;
  std::vector<double> energy_history;
  double hj_residual = 0.0;
  double continuity_residual = 0.0;
  double primal_residual = 0.0;
  /// Penalty times the change of the split variables (variational).
  double dual_residual = 0.0;
  bool converged = false;
  /// alpha values reached by continuation (newton).
  std::vector<double> alpha_path;
  /// L^2 norm of the endpoint Fourier modes that no flux can move, removed
  /// before solving.
  double removed_frozen_modes = 0.0;
  std::string message;
};

struct SolveResult {
  Trajectory trajectory;
  SolveDiagnostics diagnostics;
};

/// Solver did not converge; carries diagnostics and the last iterate.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, SolveDiagnostics diag, std::optional<Trajectory> last)
      : Error(what), diagnostics_(std::move(diag)), last_(std::move(last)) {}

  const SolveDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  const std::optional<Trajectory>& last_iterate() const noexcept { return last_; }

 private:
  SolveDiagnostics diagnostics_;
  std::optional<Trajectory> last_;
};

/// JSON record {backend, iterations, residuals[], energy, converged, ...}.
std::string diagnostics_json(const SolveDiagnostics& diag);

SolveResult solve_planning(const PlanningProblem& problem, const SolverParams& params,
                           const std::optional<Trajectory>& init = std::nullopt);

}  // namespace mfgdc
