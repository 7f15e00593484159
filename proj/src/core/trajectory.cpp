#include "mfgdc/core/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

void Trajectory::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon T must be positive");
  if (m.size() < 3) throw InvalidArgument("trajectory needs K >= 2 time steps");
  const std::size_t slices = m.size();
  for (std::size_t k = 0; k < slices; ++k) {
    if (!(m[k].grid() == grid)) throw InvalidArgument("density slice on a different grid");
    if (m[k].min() < 0.0) {
      throw InvalidArgument("negative density at slice " + std::to_string(k));
    }
  }
  if (u) {
    if (u->size() != slices) throw InvalidArgument("u has a different number of slices than m");
    for (const auto& s : *u)
      if (!(s.grid() == grid)) throw InvalidArgument("u slice on a different grid");
  }
  if (w) {
    if (w->size() != slices) throw InvalidArgument("w has a different number of slices than m");
    for (const auto& s : *w)
      if (!(s.grid() == grid)) throw InvalidArgument("w slice on a different grid");
  }
}

double Trajectory::mass_drift() const {
  const double m0 = integrate(m.front());
  double drift = 0.0;
  for (const auto& s : m) drift = std::max(drift, std::abs(integrate(s) - m0));
  return drift;
}

}  // namespace mfgdc
