#include <cmath>
#include <numbers>

#include "mfgdc/core/error.hpp"
#include "mfgdc/oracle/oracle.hpp"

namespace mfgdc {

void BumpSpec::validate() const {
  if (!std::isfinite(center)) throw InvalidArgument("bump center must be finite");
  if (!(length > 0.0 && length < 0.5)) throw InvalidArgument("bump support length must be in (0, 0.5)");
  if (!(floor >= 0.0) || !std::isfinite(floor)) throw InvalidArgument("bump floor must be >= 0");
}

double BumpSpec::value(double x) const {
  double y = x - center;
  y -= std::round(y);
  const double bump = std::abs(y) < 0.5 * length ? (1.0 + std::cos(2.0 * std::numbers::pi * y / length)) / length : 0.0;
  return bump + floor;
}

ScalarField bump_density(const BumpSpec& bump, const TorusGrid& grid) {
  bump.validate();
  if (grid.dim() != 1) throw InvalidArgument("bump densities are one-dimensional");
  auto f = ScalarField::sample(grid, [&](double x, double) { return bump.value(x); });
  f *= 1.0 / integrate(f);
  return f;
}

}  // namespace mfgdc
