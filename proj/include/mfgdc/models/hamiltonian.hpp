#pragma once

#include <array>
#include <cstdint>

namespace mfgdc {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;
using Tensor3 = std::array<Mat2, 2>;

/// Power Hamiltonian H(p) = |p|^beta / beta on R^d, d <= 2.
///
/// Vectors are passed as Vec2; in 1D the second entry must be 0.
class PowerHamiltonian {
 public:
  explicit PowerHamiltonian(double beta);

  double beta() const noexcept { return beta_; }
  /// Conjugate exponent beta' = beta / (beta - 1).
  double conjugate() const noexcept { return beta_ / (beta_ - 1.0); }

  double value(const Vec2& p) const noexcept;
  /// D_p H(p) = p |p|^{beta-2}.
  Vec2 gradient(const Vec2& p) const noexcept;
  /// D^2_pp H(p) = |p|^{beta-2} (I + (beta-2) p p^T / |p|^2).
  Mat2 hessian(const Vec2& p) const noexcept;
  /// D^3 H(p)[i][j][l]; set to 0 at p = 0.
  Tensor3 third(const Vec2& p) const noexcept;

  /// Lagrangian L(v) = |v|^{beta'} / beta'.
  double lagrangian(const Vec2& v) const noexcept;
  /// Maximizer p of p.v - H(p): p = v |v|^{beta'-2}.
  Vec2 optimal_momentum(const Vec2& v) const noexcept;

 private:
  double beta_;
};

struct LegendreCheck {
  double max_equality_gap;  // max |L(v) + H(p*) - p*.v| at the optimal p*
  double max_fenchel_excess;  // max of p.v - H(p) - L(v) over random pairs; must be <= 0
};

/// Fenchel-Young check on n_samples random planar (p, v) with |p|, |v| <= 10.
LegendreCheck legendre_pair_check(const PowerHamiltonian& h, std::size_t n_samples,
                                  std::uint64_t seed);

}  // namespace mfgdc
