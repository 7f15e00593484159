#pragma once

#include <functional>
#include <string>

namespace mfgdc {

/// Internal energy U(z) with pressure P(z) = U'(z) z - U(z).
///
/// Kinds: power U = z^q (q >= 1); scaled_power U = a z^e (covers -z^{1-1/d});
/// entropy U = z ln z; shifted_inverse U = (z + eps)^{-q}; custom (U, U').
class InternalEnergy {
 public:
  enum class Kind { power, scaled_power, entropy, shifted_inverse, custom };
  using Fn = std::function<double(double)>;

  static InternalEnergy power(double q);
  static InternalEnergy scaled_power(double coef, double exponent);
  static InternalEnergy entropy();
  static InternalEnergy shifted_inverse(double q, double eps);
  static InternalEnergy custom(Fn u, Fn du, std::string name = "custom");

  /// Parses "power:Q", "scaled_power:A:E", "entropy", "shifted_inverse:Q:EPS".
  static InternalEnergy parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  /// Exponent of the power kinds (q of z^q, e of a z^e, q of the shifted inverse).
  double exponent() const noexcept { return q_; }
  std::string describe() const;
  /// Closed-form kinds certify admissibility up to sampling; custom callables
  /// carry a sampled certificate only.
  bool sampled_certificate_only() const noexcept { return kind_ == Kind::custom; }

  /// Whether U is finite at z (z >= 0 for most kinds).
  bool defined_at(double z) const noexcept;
  double U(double z) const;
  double dU(double z) const;
  /// P(z); throws for z <= 0.
  double pressure(double z) const;
  /// P'(z) = U''(z) z; closed form except for custom kinds (centered
  /// difference with relative step 1e-6).
  double dpressure(double z) const;

 private:
  Kind kind_ = Kind::power;
  double a_ = 1.0;  // coefficient
  double q_ = 1.0;  // exponent
  double eps_ = 0.0;
  Fn u_, du_;
  std::string name_;
};

}  // namespace mfgdc
