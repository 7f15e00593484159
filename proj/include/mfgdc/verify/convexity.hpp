#pragma once

#include <string>
#include <vector>

#include "mfgdc/core/trajectory.hpp"
#include "mfgdc/models/energy.hpp"

namespace mfgdc {

struct Curve {
  std::vector<double> t;
  std::vector<double> value;
};

/// F_k = integral of U(m_k). Throws InvalidArgument naming the first slice
/// where U is undefined.
Curve functional_curve(const Trajectory& traj, const InternalEnergy& U);

struct ConvexityReport {
  std::string descriptor;
  Curve curve;
  /// (F_{k+1} - 2F_k + F_{k-1}) / dt^2, k = 1..K-1
  std::vector<double> second_differences;
  double min_second_difference;
  /// max_k F_k - ((1 - t_k/T) F_0 + (t_k/T) F_K)
  double chord_gap;
  /// tol_abs + tol_rel max|F|
  double tolerance;
  bool pass_convexity;
  bool pass_chord;
};

ConvexityReport convexity_report(const Curve& curve, double tol_abs = 1e-10, double tol_rel = 1e-3,
                                 std::string descriptor = {});

}  // namespace mfgdc
