#pragma once

// Discrete planning system shared by both backends: m at integer time nodes
// k = 0..K, u at half nodes k+1/2, k = 0..K-1.
//
//   continuity at k+1/2:  (m_{k+1} - m_k)/dt - div(rho^{1+gamma} D_pH(Du_{k+1/2})) = 0,
//                         rho = (m_k + m_{k+1})/2
//   HJ at k = 1..K-1:     -(u_{k+1/2} - u_{k-1/2})/dt
//                         + m_k^gamma (H(Du_{k-1/2}) + H(Du_{k+1/2}))/2 - g(m_k) = 0
//
// With gamma = 0 this is the optimality system of the discrete variational
// problem, so both backends solve the same equations.

#include <vector>

#include "mfgdc/core/field.hpp"
#include "mfgdc/solver/problem.hpp"

namespace mfgdc::detail {

using Slices = std::vector<std::vector<double>>;

struct StaggeredResidual {
  Slices continuity;  // K slices
  Slices hj;          // K-1 slices (interior nodes 1..K-1)
};

StaggeredResidual staggered_residual(const PlanningProblem& problem, const Slices& m, const Slices& u);

/// Max norms; HJ restricted to {m_k > support_floor}.
void staggered_norms(const PlanningProblem& problem, const Slices& m, const Slices& u, double support_floor,
                     double& hj_max, double& continuity_max);

/// Max norms with the HJ part in complementarity form |min(m_k, -r_k)|, the
/// KKT condition of the convex problem (equality on the support, r <= 0 on
/// vacuum). The continuity part excludes the frozen modes.
void staggered_kkt_norms(const PlanningProblem& problem, const Slices& m, const Slices& u, double& hj_max,
                         double& continuity_max);

/// sum over cells of [Psi(rho, w) + G(m)] h^d dt with w the staggered flux
/// and G on the integer nodes by the trapezoid rule: the objective of the
/// variational backend. With alpha > 0 it is a reference value only.
double staggered_action(const PlanningProblem& problem, const Slices& m, const Slices& u);

/// Removes the space-time mean and the time average of the frozen Fourier
/// modes from u (gauge).
void gauge_fix(const TorusGrid& grid, Slices& u);

/// Builds a Trajectory from staggered data; u and w (optional) are
/// interpolated from half to integer nodes.
Trajectory assemble_trajectory(const PlanningProblem& problem, const Slices& m, const Slices& u,
                               const std::vector<Slices>* w);

/// Clips negative densities and rescales each slice to its original mass.
void repair_positivity(Slices& m);

}  // namespace mfgdc::detail
