#include "mfgdc/verify/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

Curve functional_curve(const Trajectory& traj, const InternalEnergy& U) {
  Curve out;
  for (std::size_t k = 0; k < traj.m.size(); ++k) {
    const auto& m = traj.m[k];
    const double lo = m.min();
    if (!U.defined_at(lo) || lo < 0.0) {
      throw InvalidArgument("U undefined on slice " + std::to_string(k) + " (min m = " + std::to_string(lo) + ")");
    }
    double s = 0.0;
    for (double v : m.values()) s += U.U(v);
    out.t.push_back(traj.time(k));
    out.value.push_back(s / static_cast<double>(m.size()));
  }
  return out;
}

ConvexityReport convexity_report(const Curve& curve, double tol_abs, double tol_rel, std::string descriptor) {
  const std::size_t n = curve.value.size();
  if (n < 3 || curve.t.size() != n) throw InvalidArgument("convexity report needs K >= 2");
  ConvexityReport r;
  r.descriptor = std::move(descriptor);
  r.curve = curve;
  const double T = curve.t.back() - curve.t.front();
  const double dt = T / static_cast<double>(n - 1);
  double scale = 0.0;
  for (double v : curve.value) scale = std::max(scale, std::abs(v));
  r.tolerance = tol_abs + tol_rel * scale;
  r.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double d2 = (curve.value[k + 1] - 2.0 * curve.value[k] + curve.value[k - 1]) / (dt * dt);
    r.second_differences.push_back(d2);
    r.min_second_difference = std::min(r.min_second_difference, d2);
  }
  r.chord_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double s = (curve.t[k] - curve.t.front()) / T;
    r.chord_gap = std::max(r.chord_gap, curve.value[k] - ((1.0 - s) * curve.value.front() + s * curve.value.back()));
  }
  r.pass_convexity = r.min_second_difference >= -r.tolerance;
  r.pass_chord = r.chord_gap <= r.tolerance;
  return r;
}

}  // namespace mfgdc
