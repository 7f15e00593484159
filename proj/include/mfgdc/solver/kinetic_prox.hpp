#pragma once

#include <array>

namespace mfgdc {

/// Proximal map of the perspective kinetic density
///   Psi(rho, w) = |w|^{b'} / (b' rho^{b'-1}),  b' = beta/(beta-1),
/// with Psi(0,0) = 0 and +inf for rho < 0 or (rho = 0, w != 0):
///   argmin Psi(rho, w) + (r/2)(|rho - a|^2 + |w - b|^2).
/// Computed through the projection onto {(x, y): x + |y|^beta/beta <= 0}.
/// beta = 2 uses the closed-form cubic root; other beta a guarded Newton
/// iteration with bisection fallback (tolerance 1e-12, at most 60 steps).
struct KineticProx {
  double rho;
  std::array<double, 2> w;
};

KineticProx kinetic_prox(double a, const std::array<double, 2>& b, double r, double beta);

/// Largest real root of s^3 + p s + q = 0.
double largest_cubic_root(double p, double q);

/// Perspective value Psi(rho, w); +inf outside the domain.
double kinetic_density(double rho, const std::array<double, 2>& w, double beta);

}  // namespace mfgdc
