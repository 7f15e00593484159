#include <cmath>
#include <numbers>
#include <random>

#include "mfgdc/core/error.hpp"
#include "mfgdc/oracle/oracle.hpp"

namespace mfgdc {

ScalarField random_smooth_density(const TorusGrid& grid, std::uint64_t seed, int modes, double amplitude) {
  if (modes < 1 || 2 * modes >= static_cast<int>(grid.n())) throw InvalidArgument("modes must lie in [1, n/2)");
  if (!(amplitude >= 0.0 && amplitude < 1.0)) throw InvalidArgument("amplitude must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int ky_max = grid.dim() == 2 ? modes : 0;
  struct Mode {
    int kx, ky;
    double a, phase;
  };
  std::vector<Mode> list;
  double total = 0.0;
  for (int kx = 0; kx <= modes; ++kx)
    for (int ky = -ky_max; ky <= ky_max; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      const double a = unif(rng) / static_cast<double>(kx * kx + ky * ky);
      list.push_back({kx, ky, a, 2.0 * std::numbers::pi * unif(rng)});
      total += a;
    }
  const double scale = total > 0.0 ? amplitude / total : 0.0;
  return ScalarField::sample(grid, [&](double x, double y) {
    double v = 1.0;
    for (const auto& m : list)
      v += scale * m.a * std::cos(2.0 * std::numbers::pi * (m.kx * x + m.ky * y) + m.phase);
    return v;
  });
}

}  // namespace mfgdc
