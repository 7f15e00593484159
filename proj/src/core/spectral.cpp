#include "mfgdc/core/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

namespace {

struct FftwDeleter {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * count)));
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FourierTransform::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  Plans(int dim, std::size_t n, std::size_t spec) {
    auto real = fftw_buffer<double>(dim == 1 ? n : n * n);
    auto cplx = fftw_buffer<fftw_complex>(spec);
    const int ni = static_cast<int>(n);
    if (dim == 1) {
      r2c = fftw_plan_dft_r2c_1d(ni, real.get(), cplx.get(), FFTW_ESTIMATE);
      c2r = fftw_plan_dft_c2r_1d(ni, cplx.get(), real.get(), FFTW_ESTIMATE);
    } else {
      r2c = fftw_plan_dft_r2c_2d(ni, ni, real.get(), cplx.get(), FFTW_ESTIMATE);
      c2r = fftw_plan_dft_c2r_2d(ni, ni, cplx.get(), real.get(), FFTW_ESTIMATE);
    }
    if (r2c == nullptr || c2r == nullptr) throw Error("FFTW plan creation failed");
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
};

FourierTransform::FourierTransform(const TorusGrid& grid)
    : grid_(grid),
      spectrum_size_(grid.dim() == 1 ? grid.n() / 2 + 1 : grid.n() * (grid.n() / 2 + 1)) {
  static std::map<std::pair<int, std::size_t>, std::shared_ptr<const Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(grid.dim(), grid.n());
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_shared<const Plans>(grid.dim(), grid.n(), spectrum_size_))
             .first;
  }
  plans_ = it->second;
}

void FourierTransform::forward(std::span<const double> in, std::span<Complex> out) const {
  const std::size_t N = grid_.size();
  auto real = fftw_buffer<double>(N);
  auto cplx = fftw_buffer<fftw_complex>(spectrum_size_);
  std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(N), real.get());
  fftw_execute_dft_r2c(plans_->r2c, real.get(), cplx.get());
  for (std::size_t s = 0; s < spectrum_size_; ++s) out[s] = Complex(cplx[s][0], cplx[s][1]);
}

void FourierTransform::inverse(std::span<const Complex> in, std::span<double> out) const {
  const std::size_t N = grid_.size();
  auto real = fftw_buffer<double>(N);
  auto cplx = fftw_buffer<fftw_complex>(spectrum_size_);
  for (std::size_t s = 0; s < spectrum_size_; ++s) {
    cplx[s][0] = in[s].real();
    cplx[s][1] = in[s].imag();
  }
  fftw_execute_dft_c2r(plans_->c2r, cplx.get(), real.get());
  const double scale = 1.0 / static_cast<double>(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = real[i] * scale;
}

std::vector<Complex> FourierTransform::forward(std::span<const double> in) const {
  std::vector<Complex> out(spectrum_size_);
  forward(in, out);
  return out;
}

std::vector<double> FourierTransform::inverse(std::span<const Complex> in) const {
  std::vector<double> out(grid_.size());
  inverse(in, out);
  return out;
}

int FourierTransform::wavenumber(int axis, std::size_t s) const noexcept {
  const std::size_t n = grid_.n();
  std::size_t idx;
  if (grid_.dim() == 1) {
    idx = s;  // 0..n/2, never negative
    return static_cast<int>(idx);
  }
  const std::size_t half = n / 2 + 1;
  if (axis == 1) return static_cast<int>(s % half);
  idx = s / half;
  return idx <= n / 2 ? static_cast<int>(idx) : static_cast<int>(idx) - static_cast<int>(n);
}

bool FourierTransform::is_nyquist(int axis, std::size_t s) const noexcept {
  return std::abs(wavenumber(axis, s)) == static_cast<int>(grid_.n() / 2);
}

double FourierTransform::derivative_symbol(int axis, std::size_t s) const noexcept {
  if (is_nyquist(axis, s)) return 0.0;
  return 2.0 * std::numbers::pi * static_cast<double>(wavenumber(axis, s));
}

double FourierTransform::neg_laplacian_symbol(std::size_t s) const noexcept {
  double acc = 0.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    const double k = derivative_symbol(a, s);
    acc += k * k;
  }
  return acc;
}

ScalarField derivative(const ScalarField& f, std::array<int, 2> orders) {
  const auto& grid = f.grid();
  FourierTransform ft(grid);
  auto spec = ft.forward(f.values());
  for (std::size_t s = 0; s < spec.size(); ++s) {
    Complex factor(1.0, 0.0);
    for (int a = 0; a < grid.dim(); ++a) {
      const int order = orders[static_cast<std::size_t>(a)];
      if (order == 0) continue;
      double k = 2.0 * std::numbers::pi * ft.wavenumber(a, s);
      if (ft.is_nyquist(a, s) && order % 2 == 1) k = 0.0;
      factor *= std::pow(Complex(0.0, k), order);
    }
    spec[s] *= factor;
  }
  return ScalarField(grid, ft.inverse(spec));
}

ScalarField partial(const ScalarField& f, int axis) {
  std::array<int, 2> orders{0, 0};
  orders[static_cast<std::size_t>(axis)] = 1;
  return derivative(f, orders);
}

VectorField gradient(const ScalarField& f) {
  const auto& grid = f.grid();
  FourierTransform ft(grid);
  const auto spec = ft.forward(f.values());
  std::vector<ScalarField> comps;
  std::vector<Complex> work(spec.size());
  for (int a = 0; a < grid.dim(); ++a) {
    for (std::size_t s = 0; s < spec.size(); ++s)
      work[s] = Complex(0.0, ft.derivative_symbol(a, s)) * spec[s];
    comps.emplace_back(grid, ft.inverse(work));
  }
  return VectorField(grid, std::move(comps));
}

ScalarField divergence(const VectorField& v) {
  const auto& grid = v.grid();
  FourierTransform ft(grid);
  std::vector<Complex> acc(ft.spectrum_size(), Complex(0.0, 0.0));
  for (int a = 0; a < grid.dim(); ++a) {
    const auto spec = ft.forward(v[a].values());
    for (std::size_t s = 0; s < spec.size(); ++s)
      acc[s] += Complex(0.0, ft.derivative_symbol(a, s)) * spec[s];
  }
  return ScalarField(grid, ft.inverse(acc));
}

ScalarField laplacian(const ScalarField& f) {
  const auto& grid = f.grid();
  FourierTransform ft(grid);
  auto spec = ft.forward(f.values());
  for (std::size_t s = 0; s < spec.size(); ++s) spec[s] *= -ft.neg_laplacian_symbol(s);
  return ScalarField(grid, ft.inverse(spec));
}

double remove_frozen_modes(ScalarField& f) {
  const auto& grid = f.grid();
  FourierTransform ft(grid);
  auto spec = ft.forward(f.values());
  std::vector<Complex> removed(spec.size(), Complex(0.0, 0.0));
  bool any = false;
  for (std::size_t s = 1; s < spec.size(); ++s) {
    if (ft.neg_laplacian_symbol(s) == 0.0) {
      removed[s] = spec[s];
      spec[s] = 0.0;
      any = true;
    }
  }
  if (!any) return 0.0;
  const auto part = ft.inverse(removed);
  double norm2 = 0.0;
  for (double v : part) norm2 += v * v;
  f = ScalarField(grid, ft.inverse(spec));
  return std::sqrt(norm2 / static_cast<double>(part.size()));
}

}  // namespace mfgdc
