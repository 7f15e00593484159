#include "mfgdc/verify/identities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mfgdc/core/error.hpp"
#include "mfgdc/core/spectral.hpp"
#include "mfgdc/models/hamiltonian.hpp"

namespace mfgdc {

double trace_lemma_violation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows() || A.rows() == 0) {
    throw InvalidArgument("trace lemma needs square matrices of equal size");
  }
  const Eigen::MatrixXd AB = A * B;
  const double tr = AB.trace();
  return tr * tr / static_cast<double>(A.rows()) - (AB * AB).trace();
}

TraceLemmaResult trace_lemma_check(int d, std::size_t n_samples, std::uint64_t seed) {
  if (d < 1 || d > 8) throw InvalidArgument("trace lemma dimension must lie in [1, 8]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  TraceLemmaResult r{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  Eigen::MatrixXd M(d, d), B(d, d);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) M(i, j) = unif(rng);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) B(i, j) = B(j, i) = unif(rng);
    const Eigen::MatrixXd A = M.transpose() * M;
    const double v = trace_lemma_violation(A, B);
    const double scale = std::max(1.0, A.squaredNorm() * B.squaredNorm());
    r.max_violation = std::max(r.max_violation, v);
    r.max_scaled_violation = std::max(r.max_scaled_violation, v / scale);
  }
  return r;
}

namespace {

// Du, D2u and D3u at every grid point.
struct Jet {
  std::vector<Vec2> p;
  std::vector<Mat2> hess;
  std::vector<Tensor3> third;
};

Jet jet(const ScalarField& u, bool with_third) {
  const int d = u.grid().dim();
  const std::size_t N = u.size();
  Jet j;
  j.p.assign(N, Vec2{0.0, 0.0});
  j.hess.assign(N, Mat2{});
  if (with_third) j.third.assign(N, Tensor3{});
  auto orders = [](int a, int b, int c) {
    std::array<int, 2> o{0, 0};
    for (int x : {a, b, c})
      if (x >= 0) ++o[static_cast<std::size_t>(x)];
    return o;
  };
  for (int a = 0; a < d; ++a) {
    const auto da = derivative(u, orders(a, -1, -1));
    for (std::size_t i = 0; i < N; ++i) j.p[i][a] = da[i];
    for (int b = a; b < d; ++b) {
      const auto dab = derivative(u, orders(a, b, -1));
      for (std::size_t i = 0; i < N; ++i) j.hess[i][a][b] = j.hess[i][b][a] = dab[i];
      if (!with_third) continue;
      for (int c = b; c < d; ++c) {
        const auto dabc = derivative(u, orders(a, b, c));
        for (std::size_t i = 0; i < N; ++i) {
          const double v = dabc[i];
          auto& t = j.third[i];
          t[a][b][c] = t[a][c][b] = t[b][a][c] = t[b][c][a] = t[c][a][b] = t[c][b][a] = v;
        }
      }
    }
  }
  return j;
}

// J = D(D_pH(Du)) = D2H(Du) D2u
Mat2 flux_jacobian(const Mat2& hpp, const Mat2& hu, int d) {
  Mat2 J{};
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) J[i][k] += hpp[i][l] * hu[l][k];
  return J;
}

}  // namespace

ScalarField random_bandlimited_field(const TorusGrid& grid, std::uint64_t seed, int max_mode) {
  if (max_mode < 1 || 2 * max_mode >= static_cast<int>(grid.n())) throw InvalidArgument("max_mode must lie in [1, n/2)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const int ky_max = grid.dim() == 2 ? max_mode : 0;
  struct Mode {
    int kx, ky;
    double a, phi;
  };
  std::vector<Mode> modes;
  for (int kx = 0; kx <= max_mode; ++kx)
    for (int ky = -ky_max; ky <= ky_max; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      const double k2 = static_cast<double>(kx * kx + ky * ky);
      modes.push_back({kx, ky, normal(rng) / (2.0 * std::numbers::pi * k2), phase(rng)});
    }
  return ScalarField::sample(grid, [&](double x, double y) {
    double v = 0.0;
    for (const auto& m : modes) v += m.a * std::cos(2.0 * std::numbers::pi * (m.kx * x + m.ky * y) + m.phi);
    return v;
  });
}

// Trigonometric interpolation onto a grid `factor` times finer; the Nyquist
// mode of f is dropped.
ScalarField upsample(const ScalarField& f, std::size_t factor) {
  const auto& coarse = f.grid();
  const TorusGrid fine(coarse.dim(), coarse.n() * factor);
  const FourierTransform fc(coarse), ff(fine);
  const auto spec = fc.forward(f.values());
  std::vector<Complex> out(ff.spectrum_size(), Complex(0.0, 0.0));
  const std::size_t n = coarse.n(), nf = fine.n();
  const double scale = std::pow(static_cast<double>(factor), coarse.dim());
  const std::size_t half = n / 2 + 1, half_f = nf / 2 + 1;
  if (coarse.dim() == 1) {
    for (std::size_t s = 0; s + 1 < half; ++s) out[s] = scale * spec[s];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == n / 2) continue;
      const std::size_t fi = i < n / 2 ? i : nf - (n - i);
      for (std::size_t jy = 0; jy + 1 < half; ++jy) out[fi * half_f + jy] = scale * spec[i * half + jy];
    }
  }
  return ScalarField(fine, ff.inverse(out));
}

DivergenceTraceResult divergence_trace_check(const ScalarField& u, double beta) {
  if (beta < 2.0) throw InvalidArgument("divergence-trace identity requires beta >= 2");
  const PowerHamiltonian H(beta);
  // Both sides are evaluated on a twice finer grid and sampled at the nodes
  // of u, so polynomial fluxes of band-limited fields are not aliased.
  const ScalarField fine = upsample(u, 2);
  const auto& grid = fine.grid();
  const int d = grid.dim();
  const std::size_t N = fine.size();
  const Jet j = jet(fine, true);

  VectorField flux(grid);
  ScalarField rhs(grid);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec2& p = j.p[i];
    const Mat2& hu = j.hess[i];
    const Tensor3& u3 = j.third[i];
    const Vec2 hp = H.gradient(p);
    const Mat2 hpp = H.hessian(p);
    const Tensor3 h3 = H.third(p);

    // D(H(Du)) = D2u D_pH, then flux = D2H D(H(Du))
    Vec2 dh{0.0, 0.0};
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) dh[a] += hu[a][b] * hp[b];
    for (int a = 0; a < d; ++a) {
      double f = 0.0;
      for (int b = 0; b < d; ++b) f += hpp[a][b] * dh[b];
      flux[a][i] = f;
    }

    const Mat2 J = flux_jacobian(hpp, hu, d);
    double tr_j2 = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) tr_j2 += J[a][b] * J[b][a];
    // d/dx_k tr(J) = sum_{a,l} [sum_m D3H_{alm} u_{mk} u_{la} + D2H_{al} u_{lak}]
    double grad_div_dot = 0.0;
    for (int k = 0; k < d; ++k) {
      double g = 0.0;
      for (int a = 0; a < d; ++a)
        for (int l = 0; l < d; ++l) {
          for (int m = 0; m < d; ++m) g += h3[a][l][m] * hu[m][k] * hu[l][a];
          g += hpp[a][l] * u3[l][a][k];
        }
      grad_div_dot += g * hp[k];
    }
    rhs[i] = grad_div_dot + tr_j2;
  }
  const ScalarField lhs = divergence(flux);
  DivergenceTraceResult r{0.0, 1.0};
  const std::size_t nf = grid.n();
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t ix = d == 2 ? i / nf : i;
    const std::size_t iy = d == 2 ? i % nf : 0;
    if (ix % 2 != 0 || iy % 2 != 0) continue;
    r.residual_norm = std::max(r.residual_norm, std::abs(lhs[i] - rhs[i]));
    r.scale = std::max({r.scale, std::abs(lhs[i]), std::abs(rhs[i])});
  }
  return r;
}

EstimateSignResult estimate_rhs_sign_check(const Trajectory& traj, const PlanningProblem& problem,
                                           const InternalEnergy& U) {
  if (!traj.u) throw InvalidArgument("estimate check needs the value function u");
  const auto& H = problem.hamiltonian;
  const int d = traj.grid.dim();
  const double inv_d = 1.0 / static_cast<double>(d);
  EstimateSignResult r{std::numeric_limits<double>::infinity(), 0.0, {}};
  for (std::size_t k = 0; k < traj.m.size(); ++k) {
    const auto& m = traj.m[k];
    const Jet j = jet((*traj.u)[k], false);
    const VectorField dm = gradient(m);
    double sum = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double z = m[i];
      if (z <= 0.0) continue;
      const double P = U.pressure(z);
      const double dP = U.dpressure(z);
      const Mat2 hpp = H.hessian(j.p[i]);
      const Mat2 J = flux_jacobian(hpp, j.hess[i], d);
      double div = 0.0;
      for (int a = 0; a < d; ++a) div += J[a][a];
      double quad = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) quad += dm[a][i] * hpp[a][b] * dm[b][i];
      const double t1 = (dP * z - P + P * inv_d) * div * div;
      const double t2 = dP * problem.coupling.dg(z) * quad;
      sum += t1 + t2;
      abs_sum += std::abs(t1) + std::abs(t2);
    }
    const double n = static_cast<double>(m.size());
    r.per_slice.push_back(sum / n);
    r.min_rhs = std::min(r.min_rhs, sum / n);
    r.scale = std::max(r.scale, abs_sum / n);
  }
  return r;
}

}  // namespace mfgdc
