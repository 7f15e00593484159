#include "mfgdc/solver/kinetic_prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mfgdc {

double largest_cubic_root(double p, double q) {
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    return std::cbrt(-0.5 * q + sq) + std::cbrt(-0.5 * q - sq);
  }
  // Three real roots; p < 0 here.
  const double rad = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (p * rad), -1.0, 1.0);
  return rad * std::cos(std::acos(arg) / 3.0);
}

double kinetic_density(double rho, const std::array<double, 2>& w, double beta) {
  const double bc = beta / (beta - 1.0);
  const double nw = std::hypot(w[0], w[1]);
  if (rho < 0.0) return std::numeric_limits<double>::infinity();
  if (rho == 0.0) return nw == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(nw, bc) / (bc * std::pow(rho, bc - 1.0));
}

namespace {

// Root of phi(s) = s + a0 s^{beta-1} + s^{2 beta - 1}/beta - nb on [lo, hi],
// phi increasing there.
double solve_projection_radius(double a0, double nb, double beta, double lo, double hi) {
  auto phi = [&](double s) {
    return s + a0 * std::pow(s, beta - 1.0) + std::pow(s, 2.0 * beta - 1.0) / beta - nb;
  };
  auto dphi = [&](double s) {
    return 1.0 + (beta - 1.0) * a0 * std::pow(s, beta - 2.0) +
           (2.0 * beta - 1.0) / beta * std::pow(s, 2.0 * beta - 2.0);
  };
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double f = phi(s);
    if (f > 0.0) hi = s; else lo = s;
    if (std::abs(f) <= 1e-12 * std::max(1.0, nb) || hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    const double d = dphi(s);
    double next = d > 0.0 && std::isfinite(d) ? s - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  return s;
}

}  // namespace

KineticProx kinetic_prox(double a, const std::array<double, 2>& b, double r, double beta) {
  // Moreau: prox_{Psi/r}(z) = z - proj_K(r z) / r.
  const double a0 = r * a;
  const double nb = r * std::hypot(b[0], b[1]);
  const double h0 = std::pow(nb, beta) / beta;
  if (a0 + h0 <= 0.0) return {0.0, {0.0, 0.0}};

  const double lo = a0 < 0.0 ? std::pow(-beta * a0, 1.0 / beta) : 0.0;
  double s;
  if (beta == 2.0) {
    s = largest_cubic_root(2.0 * (1.0 + a0), -2.0 * nb);
    // One Newton polish step against cancellation in the closed form.
    const double f = s * s * s + 2.0 * (1.0 + a0) * s - 2.0 * nb;
    const double d = 3.0 * s * s + 2.0 * (1.0 + a0);
    if (d > 0.0) s -= f / d;
    s = std::clamp(s, lo, nb);
  } else {
    s = solve_projection_radius(a0, nb, beta, lo, nb);
  }
  const double proj_a = -std::pow(s, beta) / beta;
  const double scale = nb > 0.0 ? s / nb : 0.0;  // proj_b = scale * r b
  KineticProx out;
  out.rho = a - proj_a / r;
  out.w = {b[0] * (1.0 - scale), b[1] * (1.0 - scale)};
  return out;
}

}  // namespace mfgdc
