#include "mfgdc/core/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

ScalarField::ScalarField(TorusGrid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("field length " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("field contains non-finite values");
  }
}

ScalarField ScalarField::sample(const TorusGrid& grid,
                                const std::function<double(double, double)>& fn) {
  std::vector<double> v(grid.size());
  const std::size_t n = grid.n();
  if (grid.dim() == 1) {
    for (std::size_t j = 0; j < n; ++j) v[j] = fn(grid.coord(j), 0.0);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) v[i * n + j] = fn(grid.coord(i), grid.coord(j));
  }
  return ScalarField(grid, std::move(v));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(double s) {
  for (double& v : values_) v += s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(TorusGrid grid)
    : grid_(grid), components_(static_cast<std::size_t>(grid.dim()), ScalarField(grid)) {}

VectorField::VectorField(TorusGrid grid, std::vector<ScalarField> components)
    : grid_(grid), components_(std::move(components)) {
  if (components_.size() != static_cast<std::size_t>(grid_.dim())) {
    throw InvalidArgument("vector field needs one component per dimension");
  }
  for (const auto& c : components_) {
    if (!(c.grid() == grid_)) throw InvalidArgument("vector field component on a different grid");
  }
}

double integrate(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double integrate(const ScalarField& f) { return integrate(f.values()); }

double lq_norm(const ScalarField& f, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), q);
  return std::pow(s / static_cast<double>(f.size()), 1.0 / q);
}

}  // namespace mfgdc
