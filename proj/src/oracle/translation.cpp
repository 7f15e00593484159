#include <cmath>

#include "mfgdc/core/error.hpp"
#include "mfgdc/oracle/oracle.hpp"

namespace mfgdc {

Trajectory translation_solution(const BumpSpec& bump, double shift, double horizon, const TorusGrid& grid,
                                std::size_t steps) {
  bump.validate();
  if (!(bump.length + std::abs(shift) < 0.5)) {
    throw InvalidArgument("translation is optimal only when support length + |shift| < 0.5");
  }
  if (!(horizon > 0.0)) throw InvalidArgument("horizon T must be positive");
  if (steps < 2) throw InvalidArgument("K must be at least 2");
  Trajectory traj{grid, horizon, {}, std::nullopt, std::vector<VectorField>{}};
  const double speed = shift / horizon;
  for (std::size_t k = 0; k <= steps; ++k) {
    BumpSpec moved = bump;
    moved.center = bump.center + shift * static_cast<double>(k) / static_cast<double>(steps);
    auto m = bump_density(moved, grid);
    VectorField w(grid);
    w[0] = speed * m;
    traj.m.push_back(std::move(m));
    traj.w->push_back(std::move(w));
  }
  return traj;
}

}  // namespace mfgdc
