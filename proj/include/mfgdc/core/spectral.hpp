#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "mfgdc/core/field.hpp"
#include "mfgdc/core/grid.hpp"

namespace mfgdc {

using Complex = std::complex<double>;

/// Real-to-complex FFT on a TorusGrid.
///
/// The spectrum uses the half-complex layout: in 1D index j = 0..n/2, in 2D
/// index i*(n/2+1) + j with i = 0..n-1 along x and j = 0..n/2 along y.
/// forward() is unnormalized, inverse() divides by n^dim so that
/// inverse(forward(f)) == f.
///
/// Plans are shared between instances and created under a lock; execution is
/// reentrant.
class FourierTransform {
 public:
  explicit FourierTransform(const TorusGrid& grid);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t spectrum_size() const noexcept { return spectrum_size_; }

  void forward(std::span<const double> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<double> out) const;

  std::vector<Complex> forward(std::span<const double> in) const;
  std::vector<double> inverse(std::span<const Complex> in) const;

  /// Signed integer wavenumber of spectral index `s` along `axis`.
  int wavenumber(int axis, std::size_t s) const noexcept;
  /// True if the wavenumber along `axis` is the Nyquist frequency n/2.
  bool is_nyquist(int axis, std::size_t s) const noexcept;
  /// Symbol of d/dx_axis divided by i, i.e. 2*pi*k, with the Nyquist mode
  /// mapped to zero so that odd derivatives of real fields stay real.
  double derivative_symbol(int axis, std::size_t s) const noexcept;
  /// Symbol of -div(grad): sum over axes of derivative_symbol^2.
  double neg_laplacian_symbol(std::size_t s) const noexcept;

 private:
  struct Plans;
  TorusGrid grid_;
  std::size_t spectrum_size_;
  std::shared_ptr<const Plans> plans_;
};

/// Spectral partial derivative with multi-index `orders` (one entry per axis).
ScalarField derivative(const ScalarField& f, std::array<int, 2> orders);
ScalarField partial(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
/// div(grad f); Nyquist modes are annihilated exactly as in divergence(gradient(f)).
ScalarField laplacian(const ScalarField& f);

/// Removes the Fourier modes that no divergence can reach (mean excluded):
/// modes whose every wavenumber is 0 or Nyquist. Returns the L^2 norm of the
/// removed part.
double remove_frozen_modes(ScalarField& f);

}  // namespace mfgdc
