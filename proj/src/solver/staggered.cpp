#include "staggered.hpp"

#include <algorithm>
#include <cmath>

#include "mfgdc/core/spectral.hpp"
#include "mfgdc/solver/kinetic_prox.hpp"
#include "mfgdc/solver/residual.hpp"

namespace mfgdc::detail {

namespace {

struct HalfNodeTerms {
  std::vector<double> hamiltonian;  // H(Du)
  VectorField flux;                 // rho^{1+gamma} D_pH(Du)
};

HalfNodeTerms half_node_terms(const PlanningProblem& problem, const std::vector<double>& mk,
                              const std::vector<double>& mk1, const std::vector<double>& u) {
  const auto& grid = problem.grid;
  const int dim = grid.dim();
  const double gamma = problem.gamma();
  const auto du = gradient(ScalarField(grid, u));
  HalfNodeTerms out{std::vector<double>(grid.size()), VectorField(grid)};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec2 grad{du[0][p], dim == 2 ? du[1][p] : 0.0};
    out.hamiltonian[p] = problem.hamiltonian.value(grad);
    const double rho = 0.5 * (mk[p] + mk1[p]);
    const double coef = gamma == 0.0 ? rho : std::pow(rho, 1.0 + gamma);
    const Vec2 dp = problem.hamiltonian.gradient(grad);
    for (int a = 0; a < dim; ++a) out.flux[a][p] = coef * dp[static_cast<std::size_t>(a)];
  }
  return out;
}

}  // namespace

StaggeredResidual staggered_residual(const PlanningProblem& problem, const Slices& m, const Slices& u) {
  const std::size_t K = u.size();
  const std::size_t N = problem.grid.size();
  const double dt = problem.dt();
  const double gamma = problem.gamma();
  StaggeredResidual out;
  out.continuity.assign(K, std::vector<double>(N));
  out.hj.assign(K - 1, std::vector<double>(N));
  std::vector<std::vector<double>> ham(K);
  for (std::size_t j = 0; j < K; ++j) {
    auto terms = half_node_terms(problem, m[j], m[j + 1], u[j]);
    const auto div = divergence(terms.flux);
    for (std::size_t p = 0; p < N; ++p) out.continuity[j][p] = (m[j + 1][p] - m[j][p]) / dt - div[p];
    ham[j] = std::move(terms.hamiltonian);
  }
  for (std::size_t k = 1; k < K; ++k) {
    for (std::size_t p = 0; p < N; ++p) {
      const double mk = m[k][p];
      const double mg = gamma == 0.0 ? 1.0 : std::pow(mk, gamma);
      out.hj[k - 1][p] = -(u[k][p] - u[k - 1][p]) / dt + mg * 0.5 * (ham[k - 1][p] + ham[k][p]) -
                         problem.coupling.g(mk);
    }
  }
  return out;
}

double staggered_action(const PlanningProblem& problem, const Slices& m, const Slices& u) {
  const std::size_t K = u.size();
  const std::size_t N = problem.grid.size();
  const int dim = problem.grid.dim();
  const double beta = problem.hamiltonian.beta();
  double kinetic = 0.0;
  for (std::size_t j = 0; j < K; ++j) {
    const auto terms = half_node_terms(problem, m[j], m[j + 1], u[j]);
    for (std::size_t p = 0; p < N; ++p) {
      std::array<double, 2> w{terms.flux[0][p], dim == 2 ? terms.flux[1][p] : 0.0};
      kinetic += kinetic_density(0.5 * (m[j][p] + m[j + 1][p]), w, beta);
    }
  }
  double potential = 0.0;
  for (std::size_t k = 0; k <= K; ++k) {
    const double weight = (k == 0 || k == K) ? 0.5 : 1.0;
    for (std::size_t p = 0; p < N; ++p) potential += weight * problem.coupling.G(m[k][p]);
  }
  return problem.grid.cell_volume() * problem.dt() * (kinetic + potential);
}

void staggered_norms(const PlanningProblem& problem, const Slices& m, const Slices& u, double support_floor,
                     double& hj_max, double& continuity_max) {
  const auto res = staggered_residual(problem, m, u);
  hj_max = 0.0;
  continuity_max = 0.0;
  for (const auto& s : res.continuity)
    for (double v : s) continuity_max = std::max(continuity_max, std::abs(v));
  for (std::size_t k = 0; k < res.hj.size(); ++k)
    for (std::size_t p = 0; p < res.hj[k].size(); ++p)
      if (m[k + 1][p] > support_floor) hj_max = std::max(hj_max, std::abs(res.hj[k][p]));
}

void staggered_kkt_norms(const PlanningProblem& problem, const Slices& m, const Slices& u, double& hj_max,
                         double& continuity_max) {
  const auto res = staggered_residual(problem, m, u);
  hj_max = 0.0;
  continuity_max = 0.0;
  for (const auto& s : res.continuity) {
    ScalarField f(problem.grid, s);
    remove_frozen_modes(f);
    for (double v : f.values()) continuity_max = std::max(continuity_max, std::abs(v));
  }
  for (std::size_t k = 0; k < res.hj.size(); ++k)
    for (std::size_t p = 0; p < res.hj[k].size(); ++p)
      hj_max = std::max(hj_max, std::abs(std::min(m[k + 1][p], -res.hj[k][p])));
}

void gauge_fix(const TorusGrid& grid, Slices& u) {
  // Time-constant frozen modes and the constant are invisible to both
  // equations; their time average is removed.
  const std::size_t N = grid.size();
  std::vector<double> frozen_mean(N, 0.0);
  double mean = 0.0;
  for (const auto& s : u) {
    ScalarField f(grid, s);
    remove_frozen_modes(f);
    for (std::size_t p = 0; p < N; ++p) frozen_mean[p] += s[p] - f[p];
    mean += integrate(f);
  }
  const double K = static_cast<double>(u.size());
  for (auto& s : u)
    for (std::size_t p = 0; p < N; ++p) s[p] -= frozen_mean[p] / K + mean / K;
}

void repair_positivity(Slices& m) {
  for (auto& s : m) {
    double total = 0.0, positive = 0.0;
    bool negative = false;
    for (double v : s) {
      total += v;
      if (v > 0.0) positive += v; else if (v < 0.0) negative = true;
    }
    if (!negative || !(positive > 0.0)) continue;
    const double scale = total / positive;
    for (double& v : s) v = v > 0.0 ? v * scale : 0.0;
  }
}

Trajectory assemble_trajectory(const PlanningProblem& problem, const Slices& m, const Slices& u,
                               const std::vector<Slices>* w) {
  const auto& grid = problem.grid;
  std::vector<ScalarField> ms;
  for (const auto& s : m) ms.emplace_back(grid, s);
  std::vector<ScalarField> uh;
  for (const auto& s : u) uh.emplace_back(grid, s);
  Trajectory traj{grid, problem.horizon, std::move(ms), half_to_nodes(uh), std::nullopt};
  if (w != nullptr) {
    const int dim = grid.dim();
    std::vector<std::vector<ScalarField>> comps(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) {
      std::vector<ScalarField> wh;
      for (std::size_t j = 0; j < w->size(); ++j) wh.emplace_back(grid, (*w)[j][static_cast<std::size_t>(a)]);
      comps[static_cast<std::size_t>(a)] = half_to_nodes(wh);
    }
    std::vector<VectorField> ws;
    for (std::size_t k = 0; k < m.size(); ++k) {
      std::vector<ScalarField> c;
      for (int a = 0; a < dim; ++a) c.push_back(comps[static_cast<std::size_t>(a)][k]);
      ws.emplace_back(grid, std::move(c));
    }
    traj.w = std::move(ws);
  }
  return traj;
}

}  // namespace mfgdc::detail
