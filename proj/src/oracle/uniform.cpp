#include "mfgdc/core/error.hpp"
#include "mfgdc/oracle/oracle.hpp"

namespace mfgdc {

Trajectory uniform_solution(const Coupling& coupling, double horizon, const TorusGrid& grid, std::size_t steps) {
  if (!(horizon > 0.0)) throw InvalidArgument("horizon T must be positive");
  if (steps < 2) throw InvalidArgument("K must be at least 2");
  const double g1 = coupling.g(1.0);
  Trajectory traj{grid, horizon, {}, std::vector<ScalarField>{}, std::vector<VectorField>{}};
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = horizon * static_cast<double>(k) / static_cast<double>(steps);
    traj.m.emplace_back(grid, 1.0);
    traj.u->emplace_back(grid, (0.5 * horizon - t) * g1);
    traj.w->emplace_back(grid);
  }
  return traj;
}

}  // namespace mfgdc
