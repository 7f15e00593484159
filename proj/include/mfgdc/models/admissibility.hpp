#pragma once

#include <string>
#include <vector>

#include "mfgdc/models/energy.hpp"

namespace mfgdc {

/// 400 log-spaced samples on [1e-4, 1e4].
std::vector<double> default_z_grid();

struct AdmissibilityResult {
  bool admissible;
  /// min(min_z P(z), min consecutive difference of P(z)/z^{1-1/d}).
  double margin;
  double tolerance;
  /// "closed form, sampled" or "sampled certificate only".
  std::string certificate;
};

/// P >= 0 and P(z)/z^{1-1/d} non-decreasing on the samples, up to
/// tol = 1e-10 * max(|P|, |P/z^{1-1/d}|).
AdmissibilityResult displacement_admissible(const InternalEnergy& U, int d,
                                            const std::vector<double>& z_grid = default_z_grid());

/// max over samples of (1-1/d) P(z) - z P'(z), with P' by centered difference
/// (relative step 1e-6).
double pressure_growth_check(const InternalEnergy& U, int d,
                             const std::vector<double>& z_grid = default_z_grid());

struct CongestionCondition {
  bool holds;
  /// "beta>=2" or "1<beta<2".
  std::string branch;
  /// q + 2 alpha (1 - beta)
  double sign_lhs;
  /// 1 - (1-1/d)/(q + 2 alpha (1-beta)) - alpha(beta-1)/2 (or alpha/2)
  double inequality_lhs;
  double margin;
};

/// Sufficient condition for convexity of t -> int m^q under congestion.
CongestionCondition congestion_convexity_condition(double q, double alpha, double beta, int d);

struct AlphaSup {
  double value;
  /// In d = 1 the bound alpha = value itself still gives the L^inf estimate.
  bool attained_at_d1;
};

/// Supremum of alpha for which the admissible-q set is unbounded.
AlphaSup congestion_alpha_sup(double beta);

}  // namespace mfgdc
