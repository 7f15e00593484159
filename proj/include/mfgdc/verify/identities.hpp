#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mfgdc/core/field.hpp"
#include "mfgdc/core/trajectory.hpp"
#include "mfgdc/models/energy.hpp"
#include "mfgdc/solver/problem.hpp"

namespace mfgdc {

/// (1/d) tr(AB)^2 - tr((AB)^2) for d x d matrices.
double trace_lemma_violation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

struct TraceLemmaResult {
  double max_violation;         // raw, over all samples
  double max_scaled_violation;  // violation / max(1, |A|^2 |B|^2), Frobenius norms
};

/// A = M^T M with M uniform in [-1,1], B symmetric uniform in [-1,1].
TraceLemmaResult trace_lemma_check(int d, std::size_t n_samples, std::uint64_t seed);

/// Sum of random Fourier modes with wavenumbers |k_i| <= max_mode, unit
/// amplitude scale, seeded.
ScalarField random_bandlimited_field(const TorusGrid& grid, std::uint64_t seed, int max_mode = 8);

struct DivergenceTraceResult {
  double residual_norm;  // max |LHS - RHS|
  double scale;          // max(1, max|LHS|, max|RHS|)
};

/// LHS div(D2H(Du) D(H(Du))) against D(div D_pH(Du)).D_pH(Du) + tr((D(D_pH(Du)))^2),
/// derivatives of u spectral, compositions pointwise, both sides on a 2x
/// zero-padded grid sampled at the nodes of u. beta < 2 is rejected.
DivergenceTraceResult divergence_trace_check(const ScalarField& u, double beta);

struct EstimateSignResult {
  double min_rhs;                  // min over slices
  double scale;                    // max over slices of the integral of |terms|
  std::vector<double> per_slice;
};

/// Integrates (P'(m)m - P(m) + P(m)/d) (div D_pH(Du))^2 + P'(m) g'(m) Dm.D2H(Du)Dm
/// on each slice. Points with m <= 0 contribute nothing. Requires u.
EstimateSignResult estimate_rhs_sign_check(const Trajectory& traj, const PlanningProblem& problem,
                                           const InternalEnergy& U);

}  // namespace mfgdc
