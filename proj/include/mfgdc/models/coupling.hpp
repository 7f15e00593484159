#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace mfgdc {

/// Density coupling g(m) with antiderivative G(m) = int_0^m g and derivative g'.
///
/// Kinds: zero; power g = c m^theta (c >= 0, theta >= 0); table, a monotone
/// piecewise-cubic (PCHIP) interpolant of (z, g) samples with constant-slope
/// linear extension outside [z_0, z_N].
class Coupling {
 public:
  enum class Kind { zero, power, table };

  static Coupling zero();
  static Coupling power(double c, double theta);
  /// Needs at least 4 strictly increasing finite abscissas.
  static Coupling table(std::vector<double> z, std::vector<double> g);

  Kind kind() const noexcept { return kind_; }
  double c() const noexcept { return c_; }
  double theta() const noexcept { return theta_; }
  const std::vector<double>& table_z() const;
  const std::vector<double>& table_g() const;

  double g(double z) const;
  double G(double z) const;
  double dg(double z) const;

  /// Smallest g(z_{i+1}) - g(z_i) over `samples` sorted pairs drawn uniformly
  /// from [lo, hi]; >= 0 means monotone on the sample.
  double monotonicity_margin(double lo, double hi, std::size_t samples = 1000,
                             std::uint64_t seed = 0) const;
  std::string describe() const;

 private:
  struct Table;
  Kind kind_ = Kind::zero;
  double c_ = 0.0;
  double theta_ = 0.0;
  std::shared_ptr<const Table> table_;
};

/// Two-column CSV (z, g(z)); an optional non-numeric header line is skipped.
Coupling read_coupling_csv(const std::filesystem::path& path);
void write_coupling_csv(const Coupling& table, const std::filesystem::path& path);

}  // namespace mfgdc
