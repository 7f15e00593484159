#include "mfgdc/verify/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

namespace {

NormRecord norm_record(const Trajectory& traj, double q, double tol) {
  NormRecord r;
  r.q = q;
  const std::size_t K = traj.steps();
  for (const auto& m : traj.m) r.norms.push_back(lq_norm(m, q));
  const double T = traj.horizon;
  const double n0 = r.norms.front();
  const double nT = r.norms.back();

  auto chord = [&](std::size_t k) {
    const double s = traj.time(k) / T;
    return std::pow(n0, 1.0 - s) * std::pow(nT, s);
  };
  r.gap_interp = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= K; ++k) r.gap_interp = std::max(r.gap_interp, r.norms[k] - chord(k));
  r.pass_interp = r.gap_interp <= tol;

  const bool positive = std::all_of(r.norms.begin(), r.norms.end(), [](double v) { return v > 0.0; });
  if (positive && K >= 2) {
    const double p = std::isinf(q) ? 1.0 : q;
    const double dt = traj.dt();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < K; ++k) {
      const double d2 = p * (std::log(r.norms[k + 1]) - 2.0 * std::log(r.norms[k]) + std::log(r.norms[k - 1])) / (dt * dt);
      lo = std::min(lo, d2);
    }
    r.gap_log = lo;
    r.pass_log = lo >= -tol;
  } else {
    r.pass_log = false;
  }

  // Midpoint of the chord; with odd K the node nearest T/2 is used.
  const std::size_t mid = K / 2;
  r.strictness_margin = chord(mid) - r.norms[mid];
  return r;
}

}  // namespace

BoundsReport lq_logconvexity_report(const Trajectory& traj, const std::vector<double>& q_list, double tol) {
  if (traj.m.size() < 2) throw InvalidArgument("bounds report needs at least two slices");
  BoundsReport out;
  out.tolerance = tol;
  for (double q : q_list) {
    if (!(q >= 1.0)) throw InvalidArgument("q must lie in [1, inf]");
    out.records.push_back(norm_record(traj, q, tol));
  }
  return out;
}

BoundsReport extremum_bounds_report(const Trajectory& traj, int d, double tol) {
  if (traj.m.size() < 2) throw InvalidArgument("bounds report needs at least two slices");
  BoundsReport out;
  out.tolerance = tol;
  const auto& m0 = traj.m.front();
  const auto& mT = traj.m.back();
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  for (const auto& m : traj.m) {
    sup = std::max(sup, m.max());
    inf = std::min(inf, m.min());
  }
  out.sup_gap = sup - std::max(m0.max(), mT.max());
  out.pass_sup = out.sup_gap <= tol;
  if (d == 1) {
    out.inf_gap = std::min(m0.min(), mT.min()) - inf;
    out.pass_inf = *out.inf_gap <= tol;
  }
  return out;
}

}  // namespace mfgdc
