#pragma once

#include <optional>
#include <vector>

#include "mfgdc/core/trajectory.hpp"

namespace mfgdc {

struct NormRecord {
  double q;  // may be +infinity
  std::vector<double> norms;
  /// max_k N(t_k) - N(0)^{1-t_k/T} N(T)^{t_k/T}
  double gap_interp;
  bool pass_interp;
  /// min_k (ln F)'' by second differences, F = N^q (ln N for q = inf).
  /// Unset when some norm is not positive.
  std::optional<double> gap_log;
  bool pass_log;
  /// chord value minus N(T/2); informational.
  double strictness_margin;
};

struct BoundsReport {
  std::vector<NormRecord> records;
  double tolerance = 0.0;

  double sup_gap = 0.0;
  bool pass_sup = true;
  /// Only filled in 1D.
  std::optional<double> inf_gap;
  bool pass_inf = true;
};

/// Per-q norm curves, log-convexity and interpolation gaps. q = inf uses the
/// grid max.
BoundsReport lq_logconvexity_report(const Trajectory& traj, const std::vector<double>& q_list,
                                    double tol = 1e-10);

/// Fills sup_gap (and inf_gap when d = 1) of a report.
BoundsReport extremum_bounds_report(const Trajectory& traj, int d, double tol = 1e-10);

}  // namespace mfgdc
