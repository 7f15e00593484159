#pragma once

#include <optional>

#include "mfgdc/solver/problem.hpp"

namespace mfgdc {

/// Damped Newton method on the staggered space-time system in the unknowns
/// (ln m, u), with continuation in alpha when no initial guess is supplied.
///
/// The Jacobian is assembled analytically and factored as a band matrix
/// (time-interleaved unknowns). The additive constant of u, and the u modes
/// invisible to the spectral gradient, are pinned and then gauge-fixed to
/// zero space-time mean.
///
/// Throws InvalidArgument for non-positive endpoints or systems too large for
/// the band factorization, SolverFailure on divergence.
SolveResult solve_planning_newton(const PlanningProblem& problem, const SolverParams& params,
                                  const std::optional<Trajectory>& init = std::nullopt);

}  // namespace mfgdc
