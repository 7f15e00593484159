#include "mfgdc/models/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

namespace {

void check_inputs(int d, const std::vector<double>& z) {
  if (d < 1) throw InvalidArgument("dimension d must be >= 1");
  if (z.size() < 2) throw InvalidArgument("z grid needs at least two samples");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] > 0.0)) throw InvalidArgument("z grid must be positive");
    if (i > 0 && !(z[i] > z[i - 1])) throw InvalidArgument("z grid must be strictly increasing");
  }
}

}  // namespace

std::vector<double> default_z_grid() {
  constexpr int count = 400;
  std::vector<double> z(count);
  for (int i = 0; i < count; ++i) z[static_cast<std::size_t>(i)] = std::pow(10.0, -4.0 + 8.0 * i / (count - 1));
  return z;
}

AdmissibilityResult displacement_admissible(const InternalEnergy& U, int d,
                                            const std::vector<double>& z_grid) {
  check_inputs(d, z_grid);
  const double expo = 1.0 - 1.0 / d;
  std::vector<double> P(z_grid.size()), R(z_grid.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    P[i] = U.pressure(z_grid[i]);
    R[i] = P[i] / std::pow(z_grid[i], expo);
    scale = std::max({scale, std::abs(P[i]), std::abs(R[i])});
  }
  double margin = *std::min_element(P.begin(), P.end());
  for (std::size_t i = 1; i < R.size(); ++i) margin = std::min(margin, R[i] - R[i - 1]);
  const double tol = 1e-10 * scale;
  return {margin >= -tol, margin, tol,
          U.sampled_certificate_only() ? "sampled certificate only" : "closed form, sampled"};
}

double pressure_growth_check(const InternalEnergy& U, int d, const std::vector<double>& z_grid) {
  check_inputs(d, z_grid);
  double worst = -std::numeric_limits<double>::infinity();
  for (double z : z_grid) {
    const double step = 1e-6 * z;
    const double dp = (U.pressure(z + step) - U.pressure(z - step)) / (2.0 * step);
    worst = std::max(worst, (1.0 - 1.0 / d) * U.pressure(z) - z * dp);
  }
  return worst;
}

CongestionCondition congestion_convexity_condition(double q, double alpha, double beta, int d) {
  if (!(beta > 1.0)) throw InvalidArgument("beta must be > 1");
  if (!(q >= 1.0)) throw InvalidArgument("q must be >= 1");
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  if (d < 1) throw InvalidArgument("dimension d must be >= 1");
  CongestionCondition out;
  const bool high = beta >= 2.0;
  out.branch = high ? "beta>=2" : "1<beta<2";
  const double s = q + 2.0 * alpha * (1.0 - beta);
  const double num = 1.0 - 1.0 / d;
  const double penalty = high ? alpha * (beta - 1.0) / 2.0 : alpha / 2.0;
  out.sign_lhs = s;
  double frac;
  if (s > 0.0) {
    frac = num / s;
  } else if (s == 0.0 && num == 0.0) {
    frac = 0.0;
  } else {
    frac = std::numeric_limits<double>::infinity();
  }
  out.inequality_lhs = 1.0 - frac - penalty;
  out.margin = std::min(s, out.inequality_lhs);
  out.holds = s >= 0.0 && std::isfinite(frac) && out.inequality_lhs >= 0.0;
  return out;
}

AlphaSup congestion_alpha_sup(double beta) {
  if (!(beta > 1.0)) throw InvalidArgument("beta must be > 1");
  return {beta >= 2.0 ? 2.0 / (beta - 1.0) : 2.0, true};
}

}  // namespace mfgdc
