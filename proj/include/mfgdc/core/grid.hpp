#pragma once

#include <cstddef>

namespace mfgdc {

/// Uniform periodic grid on the unit torus [0,1)^dim, dim in {1,2}.
///
/// Points per axis must be a power of two (>= 8) so that the spectral
/// transforms used for derivatives stay radix-2.
class TorusGrid {
 public:
  TorusGrid(int dim, std::size_t n);

  int dim() const noexcept { return dim_; }
  std::size_t n() const noexcept { return n_; }
  /// Total number of grid points, n^dim.
  std::size_t size() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }
  double spacing() const noexcept { return 1.0 / static_cast<double>(n_); }
  /// Volume of one cell, h^dim.
  double cell_volume() const noexcept { return dim_ == 1 ? spacing() : spacing() * spacing(); }
  double coord(std::size_t j) const noexcept { return static_cast<double>(j) * spacing(); }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int dim_;
  std::size_t n_;
};

TorusGrid make_grid(int dim, std::size_t n);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace mfgdc
