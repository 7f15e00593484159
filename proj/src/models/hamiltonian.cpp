#include "mfgdc/models/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

namespace {

double norm(const Vec2& p) noexcept { return std::hypot(p[0], p[1]); }

}  // namespace

PowerHamiltonian::PowerHamiltonian(double beta) : beta_(beta) {
  if (!(beta > 1.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be > 1");
}

double PowerHamiltonian::value(const Vec2& p) const noexcept {
  return std::pow(norm(p), beta_) / beta_;
}

Vec2 PowerHamiltonian::gradient(const Vec2& p) const noexcept {
  const double r = norm(p);
  if (r == 0.0) return {0.0, 0.0};
  const double s = std::pow(r, beta_ - 2.0);
  return {p[0] * s, p[1] * s};
}

Mat2 PowerHamiltonian::hessian(const Vec2& p) const noexcept {
  const double r = norm(p);
  Mat2 out{};
  if (r == 0.0) {
    // Only finite (and nonzero) for beta = 2.
    const double diag = beta_ == 2.0 ? 1.0 : 0.0;
    out[0][0] = out[1][1] = diag;
    return out;
  }
  const double s = std::pow(r, beta_ - 2.0);
  const double c = (beta_ - 2.0) * std::pow(r, beta_ - 4.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = (i == j ? s : 0.0) + c * p[i] * p[j];
  return out;
}

Tensor3 PowerHamiltonian::third(const Vec2& p) const noexcept {
  Tensor3 out{};
  const double r = norm(p);
  if (r == 0.0 || beta_ == 2.0) return out;
  const double a = (beta_ - 2.0) * std::pow(r, beta_ - 4.0);
  const double b = (beta_ - 2.0) * (beta_ - 4.0) * std::pow(r, beta_ - 6.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) {
        const double delta = a * ((i == j ? p[l] : 0.0) + (i == l ? p[j] : 0.0) + (j == l ? p[i] : 0.0));
        out[i][j][l] = delta + b * p[i] * p[j] * p[l];
      }
  return out;
}

double PowerHamiltonian::lagrangian(const Vec2& v) const noexcept {
  const double bc = conjugate();
  return std::pow(norm(v), bc) / bc;
}

Vec2 PowerHamiltonian::optimal_momentum(const Vec2& v) const noexcept {
  const double r = norm(v);
  if (r == 0.0) return {0.0, 0.0};
  const double s = std::pow(r, conjugate() - 2.0);
  return {v[0] * s, v[1] * s};
}

LegendreCheck legendre_pair_check(const PowerHamiltonian& h, std::size_t n_samples,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.0, 10.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  auto draw = [&] {
    const double r = radius(rng);
    const double a = angle(rng);
    return Vec2{r * std::cos(a), r * std::sin(a)};
  };
  LegendreCheck out{0.0, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Vec2 v = draw();
    const Vec2 ps = h.optimal_momentum(v);
    const double lv = h.lagrangian(v);
    const double gap = std::abs(lv + h.value(ps) - (ps[0] * v[0] + ps[1] * v[1]));
    out.max_equality_gap = std::max(out.max_equality_gap, gap);
    const Vec2 p = draw();
    out.max_fenchel_excess =
        std::max(out.max_fenchel_excess, p[0] * v[0] + p[1] * v[1] - h.value(p) - lv);
  }
  return out;
}

}  // namespace mfgdc
