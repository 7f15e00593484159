#pragma once

#include <optional>
#include <vector>

#include "mfgdc/core/field.hpp"

namespace mfgdc {

/// Space-time solution sampled at t_k = k*T/K, k = 0..K.
///
/// `m` holds densities, `u` optional value-function slices, `w` optional
/// momentum (density times velocity) slices, all at the same integer time
/// nodes.
struct Trajectory {
  TorusGrid grid;
  double horizon;
  std::vector<ScalarField> m;
  std::optional<std::vector<ScalarField>> u;
  std::optional<std::vector<VectorField>> w;

  std::size_t steps() const noexcept { return m.size() - 1; }
  double dt() const noexcept { return horizon / static_cast<double>(steps()); }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt(); }

  /// Checks shapes, K >= 2, T > 0 and m >= 0; throws InvalidArgument.
  void validate() const;
  /// max_k |integral(m_k) - integral(m_0)|.
  double mass_drift() const;
};

}  // namespace mfgdc
