#include <algorithm>
#include <cmath>
#include <vector>

#include "mfgdc/core/error.hpp"
#include "mfgdc/oracle/oracle.hpp"

namespace mfgdc {

namespace {

// Cell masses of a piecewise-constant density, in cut-open order.
struct CutDensity {
  std::vector<double> cdf;  // n+1 entries, cdf[0] = 0, cdf[n] = 1
};

CutDensity cut_open(const ScalarField& m, std::size_t start) {
  const std::size_t n = m.size();
  double total = 0.0;
  for (double v : m.values()) total += v;
  CutDensity out;
  out.cdf.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) out.cdf[i + 1] = out.cdf[i] + m[(start + i) % n] / total;
  out.cdf[n] = 1.0;
  return out;
}

// Inverse CDF in cell units, right limit at s (s < 1).
double inverse_right(const CutDensity& d, double s) {
  const auto it = std::upper_bound(d.cdf.begin(), d.cdf.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - d.cdf.begin()) - 1;
  return static_cast<double>(i) + (s - d.cdf[i]) / (d.cdf[i + 1] - d.cdf[i]);
}

// Left limit at s (s > 0).
double inverse_left(const CutDensity& d, double s) {
  const auto it = std::lower_bound(d.cdf.begin(), d.cdf.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - d.cdf.begin()) - 1;
  return static_cast<double>(i) + (s - d.cdf[i]) / (d.cdf[i + 1] - d.cdf[i]);
}

std::size_t find_cut(const ScalarField& m0, const ScalarField& mT, double cut) {
  const std::size_t n = m0.size();
  const double tiny = 1e-14 * std::max(m0.max(), mT.max());
  auto empty = [&](std::size_t j) { return m0[j % n] <= tiny && mT[j % n] <= tiny; };
  if (!std::isnan(cut)) {
    double y = cut - std::floor(cut);
    const std::size_t j = static_cast<std::size_t>(std::llround(y * static_cast<double>(n))) % n;
    if (!empty(j) || !empty(j + 1) || !empty(j + n - 1)) {
      throw InvalidArgument("densities do not vanish near the requested cut");
    }
    return j;
  }
  // Middle of the longest circular run of empty cells.
  std::size_t best_len = 0, best_start = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!empty(s) || empty(s + n - 1)) continue;
    std::size_t len = 0;
    while (len < n && empty(s + len)) ++len;
    if (len > best_len) {
      best_len = len;
      best_start = s;
    }
  }
  if (best_len == n && n > 0) best_start = 0;
  if (best_len < 3) throw InvalidArgument("no common zero-mass cut found for the two densities");
  return (best_start + best_len / 2) % n;
}

}  // namespace

Trajectory quantile_interpolant_1d(const ScalarField& m0, const ScalarField& mT, double horizon, std::size_t steps,
                                   double cut, std::size_t quantiles) {
  const auto& grid = m0.grid();
  if (grid.dim() != 1 || !(mT.grid() == grid)) throw InvalidArgument("quantile interpolant needs two 1D densities on one grid");
  if (m0.min() < 0.0 || mT.min() < 0.0) throw InvalidArgument("densities must be nonnegative");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon T must be positive");
  if (steps < 2) throw InvalidArgument("K must be at least 2");
  if (quantiles < 2) throw InvalidArgument("need at least two quantiles");
  const std::size_t n = grid.n();
  const std::size_t start = find_cut(m0, mT, cut);
  const auto d0 = cut_open(m0, start);
  const auto dT = cut_open(mT, start);

  // Quantile levels: uniform samples plus every CDF breakpoint, so that both
  // inverse CDFs are linear between consecutive levels.
  std::vector<double> levels;
  levels.reserve(quantiles + 2 * n + 2);
  for (std::size_t i = 0; i <= quantiles; ++i) levels.push_back(static_cast<double>(i) / static_cast<double>(quantiles));
  levels.insert(levels.end(), d0.cdf.begin(), d0.cdf.end());
  levels.insert(levels.end(), dT.cdf.begin(), dT.cdf.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  Trajectory traj{grid, horizon, {}, std::nullopt, std::nullopt};
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double tau = static_cast<double>(k) / static_cast<double>(steps);
    std::vector<double> mass(n, 0.0);
    auto deposit = [&](double a, double b, double w) {
      // Uniform mass w on [a, b] in cell units.
      if (b - a <= 1e-14) {
        const auto i = std::min(n - 1, static_cast<std::size_t>(std::max(0.0, a)));
        mass[i] += w;
        return;
      }
      const auto first = std::min(n - 1, static_cast<std::size_t>(std::max(0.0, std::floor(a))));
      const auto last = std::min(n - 1, static_cast<std::size_t>(std::max(0.0, std::floor(b))));
      for (std::size_t i = first; i <= last; ++i) {
        const double lo = std::max(a, static_cast<double>(i));
        const double hi = std::min(b, static_cast<double>(i + 1));
        if (hi > lo) mass[i] += w * (hi - lo) / (b - a);
      }
    };
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      const double sa = levels[i], sb = levels[i + 1];
      const double xa = (1.0 - tau) * inverse_right(d0, sa) + tau * inverse_right(dT, sa);
      const double xb = (1.0 - tau) * inverse_left(d0, sb) + tau * inverse_left(dT, sb);
      deposit(xa, xb, sb - sa);
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[(start + i) % n] = mass[i] * nd;
    traj.m.emplace_back(grid, std::move(values));
  }
  return traj;
}

}  // namespace mfgdc
