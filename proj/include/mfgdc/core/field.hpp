#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mfgdc/core/grid.hpp"

namespace mfgdc {

/// Real-valued field sampled on a TorusGrid, stored row-major (index i*n + j
/// for (x_i, y_j) in 2D).
class ScalarField {
 public:
  explicit ScalarField(TorusGrid grid, double fill = 0.0);
  /// Throws InvalidArgument on length mismatch or non-finite entries.
  ScalarField(TorusGrid grid, std::vector<double> values);

  /// Samples fn at grid points; 1D fn(x, 0), 2D fn(x, y).
  static ScalarField sample(const TorusGrid& grid, const std::function<double(double, double)>& fn);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  double min() const;
  double max() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);
  ScalarField& operator+=(double s);

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// dim-component vector field on a TorusGrid.
class VectorField {
 public:
  explicit VectorField(TorusGrid grid);
  VectorField(TorusGrid grid, std::vector<ScalarField> components);

  const TorusGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  const ScalarField& operator[](int a) const { return components_[static_cast<std::size_t>(a)]; }
  ScalarField& operator[](int a) { return components_[static_cast<std::size_t>(a)]; }
  const std::vector<ScalarField>& components() const noexcept { return components_; }

 private:
  TorusGrid grid_;
  std::vector<ScalarField> components_;
};

/// Rectangle rule on the unit torus: mean of the samples.
double integrate(const ScalarField& f);
double integrate(std::span<const double> values);

/// Discrete L^q norm; q = infinity gives the grid max of |f|.
double lq_norm(const ScalarField& f, double q);

}  // namespace mfgdc
