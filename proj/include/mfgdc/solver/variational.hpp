#pragma once

#include "mfgdc/solver/problem.hpp"

namespace mfgdc {

/// Convex backend for alpha = 0: minimizes
///   sum_cells [rho L(w/rho) + G(m)] h^d dt
/// over (m, w) under the discrete continuity equation with fixed endpoints,
/// by ADMM. The continuity projection is exact (one space-time elliptic solve
/// per iteration, Fourier in space and an eigenbasis in time). u is the
/// continuity multiplier with zero space-time mean.
///
/// Throws InvalidArgument for alpha > 0 or a non-monotone coupling, and
/// SolverFailure when the residuals stay above tol_residual after max_iters.
SolveResult solve_planning_variational(const PlanningProblem& problem, const SolverParams& params);

}  // namespace mfgdc
