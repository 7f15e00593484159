#pragma once

#include <vector>

#include "mfgdc/core/field.hpp"
#include "mfgdc/core/trajectory.hpp"
#include "mfgdc/solver/problem.hpp"

namespace mfgdc {

struct ResidualNorms {
  double hj_max;
  double continuity_max;
};

/// Max-norm residuals of the congestion system (alpha = 0 gives the plain
/// system) evaluated on a Trajectory with u at the integer nodes.
///
/// Time derivatives are fourth-order finite differences (centered inside,
/// one-sided at the ends; second order when K < 4), space derivatives
/// spectral. The HJ residual is taken over {m > support_floor} only.
/// Throws InvalidArgument when u is missing.
ResidualNorms residual_norms(const Trajectory& traj, const PlanningProblem& problem,
                             double support_floor = 0.0);

/// Time derivative of a uniformly sampled sequence of fields, same stencils as
/// residual_norms.
std::vector<ScalarField> time_derivative(const std::vector<ScalarField>& slices, double dt);

/// Interpolates K half-node slices (t = (j+1/2) dt) to the K+1 integer nodes
/// with 4-point Lagrange stencils (linear when K < 4).
std::vector<ScalarField> half_to_nodes(const std::vector<ScalarField>& half);

}  // namespace mfgdc
