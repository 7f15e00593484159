#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "mfgdc/core/field.hpp"
#include "mfgdc/core/trajectory.hpp"
#include "mfgdc/models/coupling.hpp"

namespace mfgdc {

/// Raised-cosine bump (1 + cos(2 pi (x - center)/length))/length on the arc
/// |x - center| < length/2, plus an optional floor delta, renormalized so the
/// sampled density has mass 1.
struct BumpSpec {
  double center = 0.5;
  double length = 0.3;
  double floor = 0.0;

  void validate() const;
  /// Continuous profile (before grid normalization), mass 1 + floor.
  double value(double x) const;
};

ScalarField bump_density(const BumpSpec& bump, const TorusGrid& grid);

/// 1 + sum of `modes` random Fourier modes (wavenumbers 1..modes per axis),
/// amplitudes scaled so the density stays >= 1 - amplitude. Mass exactly 1.
ScalarField random_smooth_density(const TorusGrid& grid, std::uint64_t seed, int modes = 3, double amplitude = 0.5);

/// m_k(x) = bump(x - shift t_k / T), w = (shift/T) m. Requires
/// length + |shift| < 1/2. Each slice is renormalized to discrete mass 1.
Trajectory translation_solution(const BumpSpec& bump, double shift, double horizon, const TorusGrid& grid,
                                std::size_t steps);

/// 1D displacement interpolant between m0 and mT by monotone rearrangement on
/// the circle cut open at `cut` (a point where both densities vanish nearby;
/// NaN searches for one). Densities only.
Trajectory quantile_interpolant_1d(const ScalarField& m0, const ScalarField& mT, double horizon, std::size_t steps,
                                   double cut = std::numeric_limits<double>::quiet_NaN(),
                                   std::size_t quantiles = 100000);

/// m = 1, w = 0, u_k = (T/2 - t_k) g(1): zero space-time mean, exact for
/// every H with H(0) = 0 and every alpha.
Trajectory uniform_solution(const Coupling& coupling, double horizon, const TorusGrid& grid, std::size_t steps);

struct TravelingWaveSpec {
  std::function<double(double)> profile;
  double speed = 0.4;
  double alpha = 0.0;
  double beta = 2.0;
};

/// f(x) = 1 + amplitude cos(2 pi x).
std::function<double(double)> cosine_profile(double amplitude);

struct TravelingWaveOptions {
  /// Reject couplings that fail the monotonicity test.
  bool require_monotone = true;
  std::size_t table_points = 512;
  std::size_t fine_points = 4096;
};

struct TravelingWave {
  Trajectory trajectory;
  Coupling coupling;  // table on [min f, max f]
  double k0;
  /// min over consecutive table samples of g_{i+1} - g_i.
  double g_margin;
  bool monotone;
  double hj_residual;
  double continuity_residual;
};

/// Exact solution m = f(x - ct), u = psi(x - ct) of the congestion system for
/// the coupling g implied by the profile. Throws InvalidArgument when the
/// flux constant cannot be bracketed or, with require_monotone, when g is
/// not non-decreasing (margin < -1e-10).
TravelingWave traveling_wave_congestion(const TravelingWaveSpec& spec, const TorusGrid& grid, std::size_t steps,
                                        double horizon, const TravelingWaveOptions& options = {});

}  // namespace mfgdc
