#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfgdc/core/error.hpp"
#include "mfgdc/core/spectral.hpp"
#include "mfgdc/models/hamiltonian.hpp"
#include "mfgdc/oracle/oracle.hpp"
#include "mfgdc/solver/problem.hpp"
#include "mfgdc/solver/residual.hpp"

namespace mfgdc {

std::function<double(double)> cosine_profile(double amplitude) {
  return [amplitude](double x) { return 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * x); };
}

namespace {

// psi' as a function of the density z, from
// -z^{1+gamma} q |q|^{beta-2} = c z + k0.
double slope_of_density(double z, double c, double k0, double gamma, double beta) {
  const double flux = c * z + k0;
  const double mag = std::pow(std::abs(flux) / std::pow(z, 1.0 + gamma), 1.0 / (beta - 1.0));
  return flux > 0.0 ? -mag : (flux < 0.0 ? mag : 0.0);
}

}  // namespace

TravelingWave traveling_wave_congestion(const TravelingWaveSpec& spec, const TorusGrid& grid, std::size_t steps,
                                        double horizon, const TravelingWaveOptions& options) {
  if (!spec.profile) throw InvalidArgument("traveling wave needs a profile");
  if (grid.dim() != 1) throw InvalidArgument("traveling waves are one-dimensional");
  if (!(spec.speed > 0.0)) throw InvalidArgument("traveling wave speed must be positive");
  if (!(spec.alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  if (!(spec.beta > 1.0)) throw InvalidArgument("beta must be > 1");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon T must be positive");
  if (steps < 2) throw InvalidArgument("K must be at least 2");
  if (options.table_points < 4) throw InvalidArgument("coupling table needs at least 4 points");

  const double c = spec.speed;
  const double beta = spec.beta;
  const double gamma = spec.alpha * (1.0 - beta);
  const std::size_t nf = std::max<std::size_t>(options.fine_points, grid.n());
  if (!is_power_of_two(nf)) throw InvalidArgument("fine_points must be a power of two");
  const TorusGrid fine(1, nf);
  const auto f = ScalarField::sample(fine, [&](double x, double) { return spec.profile(x); });
  if (!(f.min() > 0.0)) throw InvalidArgument("traveling-wave profile must be strictly positive");
  if (std::abs(integrate(f) - 1.0) > 1e-10) throw InvalidArgument("traveling-wave profile must have mass 1");
  const double fmin = f.min(), fmax = f.max();

  auto mean_slope = [&](double k0) {
    double s = 0.0;
    for (double z : f.values()) s += slope_of_density(z, c, k0, gamma, beta);
    return s / static_cast<double>(nf);
  };
  // mean_slope is non-increasing in k0: >= 0 at -c max f, <= 0 at -c min f.
  double lo = -c * fmax, hi = -c * fmin;
  double k0 = 0.5 * (lo + hi);
  if (fmax - fmin > 0.0) {
    double flo = mean_slope(lo), fhi = mean_slope(hi);
    if (flo < 0.0 || fhi > 0.0) throw InvalidArgument("flux constant bisection has no sign change");
    for (int it = 0; it < 200; ++it) {
      k0 = 0.5 * (lo + hi);
      const double fm = mean_slope(k0);
      if (std::abs(fm) <= 1e-12) break;
      if (fm > 0.0) lo = k0; else hi = k0;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(k0)) break;
    }
    if (std::abs(mean_slope(k0)) > 1e-12) throw InvalidArgument("flux constant bisection did not reach 1e-12");
  } else {
    k0 = -c * fmin;
  }

  // Coupling table on [min f, max f].
  double zlo = fmin, zhi = fmax;
  if (zhi - zlo < 1e-9) {
    zlo -= 1e-3;
    zhi += 1e-3;
  }
  std::vector<double> tz(options.table_points), tg(options.table_points);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tz.size(); ++i) {
    const double z = zlo + (zhi - zlo) * static_cast<double>(i) / static_cast<double>(tz.size() - 1);
    const double q = slope_of_density(z, c, k0, gamma, beta);
    tz[i] = z;
    tg[i] = c * q + std::pow(z, gamma) * std::pow(std::abs(q), beta) / beta;
    if (i > 0) margin = std::min(margin, tg[i] - tg[i - 1]);
  }
  const bool monotone = margin >= -1e-10;
  if (options.require_monotone && !monotone) {
    throw InvalidArgument("traveling-wave coupling is not non-decreasing (margin " + std::to_string(margin) + ")");
  }
  auto coupling = Coupling::table(tz, tg);

  // psi on the fine grid by spectral integration of its zero-mean slope.
  std::vector<double> slope(nf);
  for (std::size_t i = 0; i < nf; ++i) slope[i] = slope_of_density(f[i], c, k0, gamma, beta);
  FourierTransform ftf(fine);
  auto psi_hat = ftf.forward(slope);
  for (std::size_t s = 0; s < psi_hat.size(); ++s) {
    const int k = ftf.wavenumber(0, s);
    psi_hat[s] = (k == 0 || ftf.is_nyquist(0, s)) ? Complex(0.0, 0.0)
                                                  : psi_hat[s] / Complex(0.0, 2.0 * std::numbers::pi * k);
  }

  // Coarse samples of psi(x - ct): shift the fine spectrum and fold it.
  const std::size_t n = grid.n();
  FourierTransform ftc(grid);
  Trajectory traj{grid, horizon, {}, std::vector<ScalarField>{}, std::vector<VectorField>{}};
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = horizon * static_cast<double>(k) / static_cast<double>(steps);
    const double shift = c * t;
    traj.m.push_back(ScalarField::sample(grid, [&](double x, double) { return spec.profile(x - shift); }));
    std::vector<Complex> coarse(ftc.spectrum_size(), Complex(0.0, 0.0));
    const double scale = static_cast<double>(n) / static_cast<double>(nf);
    for (std::size_t s = 0; s < psi_hat.size(); ++s) {
      const int wn = ftf.wavenumber(0, s);
      if (wn == 0) continue;
      const Complex v = psi_hat[s] * std::polar(scale, -2.0 * std::numbers::pi * wn * shift);
      // Real signal: positive wavenumber wn and its conjugate -wn.
      const std::size_t pos = static_cast<std::size_t>(wn) % n;
      const std::size_t neg = (n - pos) % n;
      auto add = [&](std::size_t idx, Complex val) {
        if (idx <= n / 2) coarse[idx] += val;
      };
      add(pos, v);
      if (neg != pos) add(neg, std::conj(v));
      else coarse[pos] += std::conj(v);
    }
    // Self-conjugate bins (0, n/2) must be real.
    coarse[0] = Complex(coarse[0].real(), 0.0);
    coarse[n / 2] = Complex(coarse[n / 2].real(), 0.0);
    traj.u->emplace_back(grid, ftc.inverse(coarse));
    VectorField w(grid);
    for (std::size_t p = 0; p < n; ++p) w[0][p] = c * traj.m.back()[p] + k0;
    traj.w->push_back(std::move(w));
  }

  PlanningProblem problem{grid,
                          horizon,
                          steps,
                          traj.m.front(),
                          traj.m.back(),
                          PowerHamiltonian(beta),
                          coupling,
                          spec.alpha};
  const auto res = residual_norms(traj, problem);
  return {std::move(traj), std::move(coupling), k0, margin, monotone, res.hj_max, res.continuity_max};
}

}  // namespace mfgdc
