#include "mfgdc/solver/newton.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfgdc/core/parallel.hpp"
#include "mfgdc/core/spectral.hpp"
#include "mfgdc/solver/variational.hpp"
#include "staggered.hpp"

namespace mfgdc {

namespace {

using detail::Slices;

// Band storage cap (doubles) for the factorization.
constexpr std::size_t kMaxBandEntries = std::size_t{1} << 26;

struct State {
  Slices m;  // K+1 slices, endpoints fixed
  Slices u;  // K half-node slices
};

class NewtonSolver {
 public:
  NewtonSolver(const PlanningProblem& problem, const SolverParams& params)
      : pb_(problem), prm_(params), grid_(problem.grid), N_(grid_.size()), K_(problem.steps), dt_(problem.dt()) {
    const std::size_t n = (2 * K_ - 1) * N_;
    const std::size_t kl = 2 * N_ - 1;
    if ((3 * kl + 1) * n > kMaxBandEntries) {
      throw InvalidArgument("problem too large for the banded Newton solver (" + std::to_string(n) +
                            " unknowns, bandwidth " + std::to_string(kl) + ")");
    }
    const int dim = grid_.dim();
    for (int a = 0; a < dim; ++a) {
      Eigen::MatrixXd D(N_, N_);
      for (std::size_t q = 0; q < N_; ++q) {
        ScalarField e(grid_);
        e[q] = 1.0;
        const auto col = partial(e, a);
        for (std::size_t p = 0; p < N_; ++p) D(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = col[p];
      }
      deriv_.push_back(std::move(D));
    }
    // One pin for the constant and one per frozen mode: the corners of the
    // first 2^dim cell.
    if (dim == 1) {
      pins_ = {0, 1};
    } else {
      const std::size_t n1 = grid_.n();
      pins_ = {0, 1, n1, n1 + 1};
    }
  }

  /// Newton iteration at congestion exponent alpha; returns converged flag.
  bool solve(double alpha, State& st, SolveDiagnostics& diag);

 private:
  double merit(const PlanningProblem& p, const State& st, double& maxnorm) const;
  void assemble_and_solve(const PlanningProblem& p, const State& st, const detail::StaggeredResidual& res,
                          std::vector<double>& delta) const;

  const PlanningProblem& pb_;
  const SolverParams& prm_;
  TorusGrid grid_;
  std::size_t N_, K_;
  double dt_;
  std::vector<Eigen::MatrixXd> deriv_;
  std::vector<std::size_t> pins_;
};

double NewtonSolver::merit(const PlanningProblem& p, const State& st, double& maxnorm) const {
  const auto res = detail::staggered_residual(p, st.m, st.u);
  double sum = 0.0;
  maxnorm = 0.0;
  for (const auto* block : {&res.continuity, &res.hj})
    for (const auto& s : *block)
      for (double v : s) {
        sum += v * v;
        maxnorm = std::max(maxnorm, std::abs(v));
      }
  if (!std::isfinite(sum)) maxnorm = std::numeric_limits<double>::infinity();
  return std::isfinite(sum) ? 0.5 * sum : std::numeric_limits<double>::infinity();
}

void NewtonSolver::assemble_and_solve(const PlanningProblem& p, const State& st,
                                      const detail::StaggeredResidual& res, std::vector<double>& delta) const {
  const int dim = grid_.dim();
  const auto& H = p.hamiltonian;
  const double gamma = p.gamma();
  const auto Ni = static_cast<Eigen::Index>(N_);
  const std::size_t n = (2 * K_ - 1) * N_;
  const std::size_t kl = 2 * N_ - 1, ku = kl;
  const std::size_t ldab = 2 * kl + ku + 1;
  std::vector<double> ab(ldab * n, 0.0);
  auto at = [&](std::size_t row, std::size_t col) -> double& { return ab[(kl + ku + row - col) + col * ldab]; };
  auto put_block = [&](std::size_t brow, std::size_t bcol, const Eigen::MatrixXd& B) {
    for (std::size_t q = 0; q < N_; ++q)
      for (std::size_t r = 0; r < N_; ++r)
        at(brow * N_ + r, bcol * N_ + q) = B(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q));
  };

  // Per half node: gradient of u, D_pH, H_pp.
  std::vector<std::vector<Vec2>> grad(K_), dph(K_);
  std::vector<std::vector<double>> ham(K_);
  for (std::size_t j = 0; j < K_; ++j) {
    const auto du = gradient(ScalarField(grid_, st.u[j]));
    grad[j].resize(N_);
    dph[j].resize(N_);
    ham[j].resize(N_);
    for (std::size_t x = 0; x < N_; ++x) {
      grad[j][x] = {du[0][x], dim == 2 ? du[1][x] : 0.0};
      dph[j][x] = H.gradient(grad[j][x]);
      ham[j][x] = H.value(grad[j][x]);
    }
  }

#pragma omp parallel for num_threads(worker_count()) schedule(dynamic)
  for (std::size_t j = 0; j < K_; ++j) {
    const auto& mk = st.m[j];
    const auto& mk1 = st.m[j + 1];
    // Continuity row block 2j, column u_j (block 2j).
    Eigen::MatrixXd Jcu = Eigen::MatrixXd::Zero(Ni, Ni);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        Eigen::VectorXd c(Ni);
        for (std::size_t x = 0; x < N_; ++x) {
          const double rho = 0.5 * (mk[x] + mk1[x]);
          const double coef = gamma == 0.0 ? rho : std::pow(rho, 1.0 + gamma);
          c(static_cast<Eigen::Index>(x)) = coef * H.hessian(grad[j][x])[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        }
        Jcu.noalias() -= deriv_[static_cast<std::size_t>(a)] * c.asDiagonal() * deriv_[static_cast<std::size_t>(b)];
      }
    put_block(2 * j, 2 * j, Jcu);
    // Continuity wrt s_j (block 2j-1) and s_{j+1} (block 2j+1).
    for (int side = 0; side < 2; ++side) {
      const std::size_t node = j + static_cast<std::size_t>(side);
      if (node == 0 || node == K_) continue;
      const auto& mn = st.m[node];
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(Ni, Ni);
      for (int a = 0; a < dim; ++a) {
        Eigen::VectorXd e(Ni);
        for (std::size_t x = 0; x < N_; ++x) {
          const double rho = 0.5 * (mk[x] + mk1[x]);
          const double drho = gamma == 0.0 ? 1.0 : (1.0 + gamma) * std::pow(rho, gamma);
          e(static_cast<Eigen::Index>(x)) = drho * 0.5 * dph[j][x][static_cast<std::size_t>(a)] * mn[x];
        }
        B.noalias() -= deriv_[static_cast<std::size_t>(a)] * e.asDiagonal();
      }
      const double sign = side == 1 ? 1.0 : -1.0;
      for (std::size_t x = 0; x < N_; ++x) B(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) += sign * mn[x] / dt_;
      put_block(2 * j, 2 * node - 1, B);
    }
  }

#pragma omp parallel for num_threads(worker_count()) schedule(dynamic)
  for (std::size_t k = 1; k < K_; ++k) {
    const auto& mk = st.m[k];
    // HJ row block 2k-1: wrt u_{k-1} (block 2k-2) and u_k (block 2k).
    for (int side = 0; side < 2; ++side) {
      const std::size_t j = k - 1 + static_cast<std::size_t>(side);
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(Ni, Ni);
      for (int b = 0; b < dim; ++b) {
        Eigen::VectorXd f(Ni);
        for (std::size_t x = 0; x < N_; ++x) {
          const double mg = gamma == 0.0 ? 1.0 : std::pow(mk[x], gamma);
          f(static_cast<Eigen::Index>(x)) = mg * 0.5 * dph[j][x][static_cast<std::size_t>(b)];
        }
        B.noalias() += f.asDiagonal() * deriv_[static_cast<std::size_t>(b)];
      }
      const double sign = side == 1 ? -1.0 : 1.0;
      for (std::size_t x = 0; x < N_; ++x) B(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) += sign / dt_;
      put_block(2 * k - 1, 2 * j, B);
    }
    // wrt s_k (block 2k-1), diagonal.
    for (std::size_t x = 0; x < N_; ++x) {
      const double m = mk[x];
      const double mg = gamma == 0.0 ? 1.0 : std::pow(m, gamma);
      const double hsum = 0.5 * (ham[k - 1][x] + ham[k][x]);
      at((2 * k - 1) * N_ + x, (2 * k - 1) * N_ + x) = gamma * mg * hsum - p.coupling.dg(m) * m;
    }
  }

  // Right-hand side, interleaved like the unknowns.
  delta.assign(n, 0.0);
  for (std::size_t j = 0; j < K_; ++j)
    for (std::size_t x = 0; x < N_; ++x) delta[2 * j * N_ + x] = -res.continuity[j][x];
  for (std::size_t k = 1; k < K_; ++k)
    for (std::size_t x = 0; x < N_; ++x) delta[(2 * k - 1) * N_ + x] = -res.hj[k - 1][x];

  // Pins replace the redundant continuity rows at half node 0.
  for (std::size_t x : pins_) {
    const std::size_t row = x;
    const std::size_t lo = row > kl ? row - kl : 0;
    const std::size_t hi = std::min(n - 1, row + ku);
    for (std::size_t col = lo; col <= hi; ++col) at(row, col) = 0.0;
    at(row, row) = 1.0;
    delta[row] = 0.0;
  }

  std::vector<lapack_int> piv(n);
  const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), static_cast<lapack_int>(kl),
                                        static_cast<lapack_int>(ku), 1, ab.data(), static_cast<lapack_int>(ldab),
                                        piv.data(), delta.data(), static_cast<lapack_int>(n));
  if (info != 0) throw Error("singular Newton matrix (dgbsv info " + std::to_string(info) + ")");
}

bool NewtonSolver::solve(double alpha, State& st, SolveDiagnostics& diag) {
  PlanningProblem p = pb_;
  p.alpha = alpha;
  double maxnorm = 0.0;
  double phi = merit(p, st, maxnorm);
  diag.residual_history.push_back(maxnorm);
  for (std::size_t it = 0; it < prm_.newton_max_iters; ++it) {
    if (maxnorm <= prm_.tol_residual) return true;
    const auto res = detail::staggered_residual(p, st.m, st.u);
    std::vector<double> delta;
    try {
      assemble_and_solve(p, st, res, delta);
    } catch (const Error&) {
      return false;
    }
    ++diag.iterations;
    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= prm_.min_damping) {
      State trial = st;
      for (std::size_t j = 0; j < K_; ++j)
        for (std::size_t x = 0; x < N_; ++x) trial.u[j][x] += lambda * delta[2 * j * N_ + x];
      for (std::size_t k = 1; k < K_; ++k)
        for (std::size_t x = 0; x < N_; ++x)
          trial.m[k][x] = st.m[k][x] * std::exp(lambda * delta[(2 * k - 1) * N_ + x]);
      double trial_max = 0.0;
      const double trial_phi = merit(p, trial, trial_max);
      if (trial_phi <= (1.0 - 1e-4 * lambda) * phi) {
        st = std::move(trial);
        phi = trial_phi;
        maxnorm = trial_max;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    diag.residual_history.push_back(maxnorm);
    if (!accepted) return maxnorm <= prm_.tol_residual;
  }
  return maxnorm <= prm_.tol_residual;
}

State linear_guess(const ScalarField& m0, const ScalarField& mT, std::size_t K) {
  State st;
  st.m.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(K);
    st.m[k].resize(m0.size());
    for (std::size_t p = 0; p < m0.size(); ++p) st.m[k][p] = (1.0 - t) * m0[p] + t * mT[p];
  }
  st.u.assign(K, std::vector<double>(m0.size(), 0.0));
  return st;
}

// Integer-node u back to half nodes.
Slices nodes_to_half(const std::vector<ScalarField>& u) {
  Slices out(u.size() - 1);
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    out[j].resize(u[j].size());
    for (std::size_t p = 0; p < u[j].size(); ++p) out[j][p] = 0.5 * (u[j][p] + u[j + 1][p]);
  }
  return out;
}

}  // namespace

SolveResult solve_planning_newton(const PlanningProblem& problem, const SolverParams& params,
                                  const std::optional<Trajectory>& init) {
  problem.validate();
  params.validate();
  if (!(problem.m0.min() > 0.0) || !(problem.mT.min() > 0.0)) {
    throw InvalidArgument("newton backend requires strictly positive endpoint densities");
  }
  PlanningProblem pb = problem;
  SolveDiagnostics diag;
  diag.backend = "newton";
  diag.removed_frozen_modes = remove_frozen_modes(pb.m0) + remove_frozen_modes(pb.mT);
  pb.mT *= integrate(pb.m0) / integrate(pb.mT);
  if (!(pb.m0.min() > 0.0) || !(pb.mT.min() > 0.0)) {
    throw InvalidArgument("endpoint densities lose positivity after removing unreachable modes");
  }
  NewtonSolver solver(pb, params);
  const std::size_t K = pb.steps;

  State st = linear_guess(pb.m0, pb.mT, K);
  bool have_start = false;
  if (init) {
    if (!(init->grid == pb.grid) || init->m.size() != K + 1) {
      throw InvalidArgument("initial trajectory does not match the problem discretization");
    }
    for (std::size_t k = 1; k < K; ++k) {
      st.m[k] = init->m[k].data();
      for (double& v : st.m[k]) v = std::max(v, 1e-8);
    }
    if (init->u) st.u = nodes_to_half(*init->u);
    have_start = true;
  }

  auto fail = [&](const std::string& what, const State& last) -> SolverFailure {
    diag.message = what;
    Slices u = last.u;
    detail::gauge_fix(pb.grid, u);
    double hj = 0.0, cont = 0.0;
    detail::staggered_norms(pb, last.m, u, params.eps_m, hj, cont);
    diag.hj_residual = hj;
    diag.continuity_residual = cont;
    diag.energy = detail::staggered_action(pb, last.m, u);
    return SolverFailure(what, diag, detail::assemble_trajectory(pb, last.m, u, nullptr));
  };

  double reached = 0.0;
  if (have_start || pb.alpha == 0.0) {
    reached = pb.alpha;
    if (!solver.solve(pb.alpha, st, diag)) {
      throw fail("newton iteration did not converge at alpha = " + std::to_string(pb.alpha), st);
    }
    diag.alpha_path.push_back(pb.alpha);
  } else {
    // Continuation: alpha = 0 first, variationally when that backend applies.
    bool monotone = pb.coupling.kind() != Coupling::Kind::table ||
                    pb.coupling.monotonicity_margin(pb.coupling.table_z().front(), pb.coupling.table_z().back()) >= -1e-12;
    if (monotone) {
      PlanningProblem p0 = pb;
      p0.alpha = 0.0;
      SolverParams vp = params;
      vp.backend = Backend::variational;
      vp.tol_residual = std::max(params.tol_residual, 1e-5);
      std::optional<Trajectory> warm;
      try {
        warm = solve_planning_variational(p0, vp).trajectory;
      } catch (const SolverFailure& e) {
        warm = e.last_iterate();
      }
      if (warm) {
        for (std::size_t k = 1; k < K; ++k) {
          st.m[k] = warm->m[k].data();
          for (double& v : st.m[k]) v = std::max(v, 1e-8);
        }
        st.u = nodes_to_half(*warm->u);
      }
    }
    State start = st;
    if (solver.solve(0.0, st, diag)) {
      diag.alpha_path.push_back(0.0);
      double step = params.alpha_step;
      while (reached < pb.alpha) {
        const double next = std::min(pb.alpha, reached + step);
        State trial = st;
        if (solver.solve(next, trial, diag)) {
          st = std::move(trial);
          reached = next;
          diag.alpha_path.push_back(next);
        } else {
          step *= 0.5;
          if (step < params.min_alpha_step) {
            throw fail("continuation stalled at alpha = " + std::to_string(reached), st);
          }
        }
      }
    } else {
      // No alpha = 0 solution reachable: attempt the target directly.
      st = start;
      if (!solver.solve(pb.alpha, st, diag)) {
        throw fail("newton iteration did not converge at alpha = 0 or directly at alpha = " +
                       std::to_string(pb.alpha),
                   st);
      }
      reached = pb.alpha;
      diag.alpha_path.push_back(pb.alpha);
    }
  }

  detail::gauge_fix(pb.grid, st.u);
  double hj = 0.0, cont = 0.0;
  detail::staggered_norms(pb, st.m, st.u, 0.0, hj, cont);
  diag.hj_residual = hj;
  diag.continuity_residual = cont;
  diag.energy = detail::staggered_action(pb, st.m, st.u);
  diag.converged = std::max(hj, cont) <= params.tol_residual;
  diag.message = diag.converged ? "converged" : "residual above tolerance after gauge fix";
  auto traj = detail::assemble_trajectory(pb, st.m, st.u, nullptr);
  if (!diag.converged) throw SolverFailure(diag.message, diag, std::move(traj));
  return {std::move(traj), std::move(diag)};
}

}  // namespace mfgdc
