#include "mfgdc/solver/problem.hpp"

#include <cmath>
#include <json.hpp>

#include "mfgdc/solver/newton.hpp"
#include "mfgdc/solver/variational.hpp"

namespace mfgdc {

void PlanningProblem::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon T must be positive");
  if (steps < 2) throw InvalidArgument("K must be at least 2");
  if (!(m0.grid() == grid) || !(mT.grid() == grid)) throw InvalidArgument("endpoint densities on a different grid");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("congestion alpha must be >= 0");
  for (const auto* f : {&m0, &mT}) {
    const char* name = f == &m0 ? "m0" : "mT";
    if (f->min() < 0.0) throw InvalidArgument(std::string(name) + " has negative values");
    if (std::abs(integrate(*f) - 1.0) > 1e-10) throw InvalidArgument(std::string(name) + " must have mass 1");
    if (alpha > 0.0 && !(f->min() > 0.0)) {
      throw InvalidArgument(std::string(name) + " must be strictly positive when alpha > 0");
    }
  }
}

void SolverParams::validate() const {
  if (!(tol_residual > 0.0)) throw InvalidArgument("tol_residual must be positive");
  if (max_iters == 0) throw InvalidArgument("max_iters must be positive");
  if (!(penalty > 0.0)) throw InvalidArgument("penalty must be positive");
  if (check_every == 0) throw InvalidArgument("check_every must be positive");
  if (!(alpha_step > 0.0)) throw InvalidArgument("alpha_step must be positive");
  if (!(min_alpha_step > 0.0) || min_alpha_step > alpha_step) {
    throw InvalidArgument("min_alpha_step must be in (0, alpha_step]");
  }
  if (!(min_damping > 0.0) || min_damping > 1.0) throw InvalidArgument("min_damping must be in (0, 1]");
  if (!(eps_m >= 0.0)) throw InvalidArgument("eps_m must be >= 0");
}

std::string diagnostics_json(const SolveDiagnostics& d) {
  nlohmann::ordered_json j;
  j["backend"] = d.backend;
  j["iterations"] = d.iterations;
  j["residuals"] = d.residual_history;
  j["energy"] = d.energy;
  j["converged"] = d.converged;
  j["hj_residual"] = d.hj_residual;
  j["continuity_residual"] = d.continuity_residual;
  j["primal_residual"] = d.primal_residual;
  j["dual_residual"] = d.dual_residual;
  j["energy_history"] = d.energy_history;
  j["alpha_path"] = d.alpha_path;
  j["removed_frozen_modes"] = d.removed_frozen_modes;
  j["message"] = d.message;
  return j.dump(2);
}

SolveResult solve_planning(const PlanningProblem& problem, const SolverParams& params,
                           const std::optional<Trajectory>& init) {
  if (params.backend == Backend::variational) return solve_planning_variational(problem, params);
  return solve_planning_newton(problem, params, init);
}

}  // namespace mfgdc
