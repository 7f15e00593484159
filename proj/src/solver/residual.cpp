#include "mfgdc/solver/residual.hpp"

#include <algorithm>
#include <cmath>

#include "mfgdc/core/error.hpp"
#include "mfgdc/core/spectral.hpp"

namespace mfgdc {

namespace {

// out = sum_i c[i] * f[idx[i]]
ScalarField combine(const std::vector<ScalarField>& f, std::initializer_list<std::pair<std::size_t, double>> terms,
                    double scale) {
  ScalarField out(f.front().grid());
  for (const auto& [i, c] : terms) {
    const auto& src = f[i].data();
    auto& dst = out.data();
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += c * src[p];
  }
  out *= scale;
  return out;
}

}  // namespace

std::vector<ScalarField> time_derivative(const std::vector<ScalarField>& f, double dt) {
  const std::size_t n = f.size();
  if (n < 3) throw InvalidArgument("time derivative needs at least 3 slices");
  std::vector<ScalarField> out;
  out.reserve(n);
  if (n < 5) {
    const double s = 1.0 / (2.0 * dt);
    out.push_back(combine(f, {{0, -3.0}, {1, 4.0}, {2, -1.0}}, s));
    for (std::size_t k = 1; k + 1 < n; ++k) out.push_back(combine(f, {{k + 1, 1.0}, {k - 1, -1.0}}, s));
    out.push_back(combine(f, {{n - 1, 3.0}, {n - 2, -4.0}, {n - 3, 1.0}}, s));
    return out;
  }
  const double s = 1.0 / (12.0 * dt);
  out.push_back(combine(f, {{0, -25.0}, {1, 48.0}, {2, -36.0}, {3, 16.0}, {4, -3.0}}, s));
  out.push_back(combine(f, {{0, -3.0}, {1, -10.0}, {2, 18.0}, {3, -6.0}, {4, 1.0}}, s));
  for (std::size_t k = 2; k + 2 < n; ++k)
    out.push_back(combine(f, {{k - 2, 1.0}, {k - 1, -8.0}, {k + 1, 8.0}, {k + 2, -1.0}}, s));
  const std::size_t e = n - 1;
  out.push_back(combine(f, {{e, 3.0}, {e - 1, 10.0}, {e - 2, -18.0}, {e - 3, 6.0}, {e - 4, -1.0}}, s));
  out.push_back(combine(f, {{e, 25.0}, {e - 1, -48.0}, {e - 2, 36.0}, {e - 3, -16.0}, {e - 4, 3.0}}, s));
  return out;
}

std::vector<ScalarField> half_to_nodes(const std::vector<ScalarField>& h) {
  const std::size_t K = h.size();
  if (K < 2) throw InvalidArgument("need at least two half-node slices");
  std::vector<ScalarField> out;
  out.reserve(K + 1);
  if (K < 4) {
    out.push_back(combine(h, {{0, 1.5}, {1, -0.5}}, 1.0));
    for (std::size_t k = 1; k < K; ++k) out.push_back(combine(h, {{k - 1, 0.5}, {k, 0.5}}, 1.0));
    out.push_back(combine(h, {{K - 1, 1.5}, {K - 2, -0.5}}, 1.0));
    return out;
  }
  // Lagrange weights for nodes at half-integer offsets.
  out.push_back(combine(h, {{0, 35.0}, {1, -35.0}, {2, 21.0}, {3, -5.0}}, 1.0 / 16.0));
  out.push_back(combine(h, {{0, 5.0}, {1, 15.0}, {2, -5.0}, {3, 1.0}}, 1.0 / 16.0));
  for (std::size_t k = 2; k + 1 < K; ++k)
    out.push_back(combine(h, {{k - 2, -1.0}, {k - 1, 9.0}, {k, 9.0}, {k + 1, -1.0}}, 1.0 / 16.0));
  out.push_back(combine(h, {{K - 1, 5.0}, {K - 2, 15.0}, {K - 3, -5.0}, {K - 4, 1.0}}, 1.0 / 16.0));
  out.push_back(combine(h, {{K - 1, 35.0}, {K - 2, -35.0}, {K - 3, 21.0}, {K - 4, -5.0}}, 1.0 / 16.0));
  return out;
}

ResidualNorms residual_norms(const Trajectory& traj, const PlanningProblem& problem,
                             double support_floor) {
  if (!traj.u) throw InvalidArgument("residual_norms needs a trajectory carrying u");
  if (!(traj.grid == problem.grid)) throw InvalidArgument("trajectory and problem grids differ");
  const auto& H = problem.hamiltonian;
  const double gamma = problem.gamma();
  const int dim = traj.grid.dim();
  const double dt = traj.dt();
  const auto ut = time_derivative(*traj.u, dt);
  const auto mt = time_derivative(traj.m, dt);

  ResidualNorms out{0.0, 0.0};
  for (std::size_t k = 0; k < traj.m.size(); ++k) {
    const auto& m = traj.m[k];
    const auto du = gradient((*traj.u)[k]);
    VectorField flux(traj.grid);
    for (std::size_t p = 0; p < m.size(); ++p) {
      const Vec2 grad{du[0][p], dim == 2 ? du[1][p] : 0.0};
      const double mp = m[p];
      const double mg = gamma == 0.0 ? 1.0 : std::pow(mp, gamma);
      if (mp > support_floor) {
        const double hj = -ut[k][p] + mg * H.value(grad) - problem.coupling.g(mp);
        out.hj_max = std::max(out.hj_max, std::abs(hj));
      }
      const Vec2 dp = H.gradient(grad);
      const double coef = gamma == 0.0 ? mp : mp * mg;
      for (int a = 0; a < dim; ++a) flux[a][p] = coef * dp[static_cast<std::size_t>(a)];
    }
    const auto div = divergence(flux);
    for (std::size_t p = 0; p < m.size(); ++p)
      out.continuity_max = std::max(out.continuity_max, std::abs(mt[k][p] - div[p]));
  }
  return out;
}

}  // namespace mfgdc
