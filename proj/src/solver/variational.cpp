#include "mfgdc/solver/variational.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfgdc/core/parallel.hpp"
#include "mfgdc/core/spectral.hpp"
#include "mfgdc/solver/kinetic_prox.hpp"
#include "staggered.hpp"

namespace mfgdc {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CRowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// argmin_mu G(mu) + (r/2)(mu - a)^2 over mu >= 0, i.e. g(mu) + r(mu - a) = 0.
double potential_prox(const Coupling& c, double a, double r) {
  switch (c.kind()) {
    case Coupling::Kind::zero:
      return std::max(a, 0.0);
    case Coupling::Kind::power:
      if (c.theta() == 0.0) return std::max(a - c.c() / r, 0.0);
      if (c.theta() == 1.0) return std::max(r * a / (r + c.c()), 0.0);
      break;
    case Coupling::Kind::table:
      break;
  }
  const double g0 = c.g(0.0);
  if (g0 - r * a >= 0.0) return 0.0;
  double lo = 0.0;
  double hi = a - g0 / r;
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double f = c.g(s) + r * (s - a);
    if (f > 0.0) hi = s; else lo = s;
    if (std::abs(f) <= 1e-14 * std::max(1.0, r * std::abs(a)) || hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    const double d = c.dg(s) + r;
    double next = std::isfinite(d) && d > 0.0 ? s - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  return s;
}

class Admm {
 public:
  Admm(const PlanningProblem& problem, const SolverParams& params)
      : pb_(problem),
        prm_(params),
        grid_(problem.grid),
        ft_(problem.grid),
        K_(problem.steps),
        N_(problem.grid.size()),
        S_(ft_.spectrum_size()),
        dim_(problem.grid.dim()),
        dt_(problem.dt()),
        r_(params.penalty),
        m0_(problem.m0),
        mT_(problem.mT) {
    // Frozen modes carry no continuity constraint here; the endpoints stay
    // as given and the interior slices pick those modes freely.
    mT_ *= integrate(m0_) / integrate(mT_);
    build_time_operators();
    init_state();
  }

  SolveResult run();

 private:
  void build_time_operators();
  void init_state();
  void x_step();
  void y_step();
  double dual_update();
  void rescale_penalty(double factor);
  void assemble_u(detail::Slices& u) const;
  detail::Slices full_m() const;
  std::vector<detail::Slices> half_w() const;
  double energy() const;

  const PlanningProblem& pb_;
  const SolverParams& prm_;
  TorusGrid grid_;
  FourierTransform ft_;
  std::size_t K_, N_, S_;
  int dim_;
  double dt_;
  double r_;
  ScalarField m0_, mT_;

  // Time operators on interior nodes (K-1) and half nodes (K).
  Eigen::MatrixXd S_avg_;    // K x (K-1)
  Eigen::MatrixXd Minv_;     // (K-1) x (K-1)
  Eigen::MatrixXd P1_;       // D M^{-1}, K x (K-1)
  Eigen::MatrixXd Q_;        // eigenvectors of D M^{-1} D^T
  Eigen::VectorXd lambda_;
  Eigen::VectorXd kappa_;    // -Laplacian symbol per spectral index
  RowMat b_rho_;             // affine endpoint part of rho, K x N
  RowMat c_end_;             // endpoint part of the continuity constraint, K x N

  // Primal x = (m, w), split y = (rho, sig, mu), scaled multipliers.
  RowMat m_;                 // (K-1) x N
  std::vector<RowMat> w_;    // dim of K x N
  RowMat rho_, mu_;
  std::vector<RowMat> sig_;
  RowMat lrho_, lmu_;
  std::vector<RowMat> lsig_;
  RowMat phi_;               // K x N multiplier of the last projection
  RowMat rho_x_;             // S m + b of the last projection
  RowMat prev_rho_, prev_mu_;
  std::vector<RowMat> prev_sig_;
};

void Admm::build_time_operators() {
  const auto Ki = static_cast<Eigen::Index>(K_);
  S_avg_ = Eigen::MatrixXd::Zero(Ki, Ki - 1);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(Ki, Ki - 1);
  for (Eigen::Index j = 0; j < Ki; ++j) {
    // rho_j = (m_j + m_{j+1})/2 with interior index i = node - 1.
    if (j >= 1) {
      S_avg_(j, j - 1) = 0.5;
      D(j, j - 1) = -1.0 / dt_;
    }
    if (j + 1 <= Ki - 1) {
      S_avg_(j, j) = 0.5;
      D(j, j) = 1.0 / dt_;
    }
  }
  const Eigen::MatrixXd M = S_avg_.transpose() * S_avg_ + Eigen::MatrixXd::Identity(Ki - 1, Ki - 1);
  Minv_ = M.llt().solve(Eigen::MatrixXd::Identity(Ki - 1, Ki - 1));
  P1_ = D * Minv_;
  Eigen::MatrixXd T = P1_ * D.transpose();
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
  Q_ = eig.eigenvectors();
  lambda_ = eig.eigenvalues();
  kappa_.resize(static_cast<Eigen::Index>(S_));
  for (std::size_t s = 0; s < S_; ++s) kappa_(static_cast<Eigen::Index>(s)) = ft_.neg_laplacian_symbol(s);

  const auto Ni = static_cast<Eigen::Index>(N_);
  b_rho_ = RowMat::Zero(Ki, Ni);
  c_end_ = RowMat::Zero(Ki, Ni);
  for (Eigen::Index p = 0; p < Ni; ++p) {
    const auto pu = static_cast<std::size_t>(p);
    b_rho_(0, p) += 0.5 * m0_[pu];
    b_rho_(Ki - 1, p) += 0.5 * mT_[pu];
    c_end_(0, p) -= m0_[pu] / dt_;
    c_end_(Ki - 1, p) += mT_[pu] / dt_;
  }
}

void Admm::init_state() {
  const auto Ki = static_cast<Eigen::Index>(K_);
  const auto Ni = static_cast<Eigen::Index>(N_);
  m_.resize(Ki - 1, Ni);
  for (Eigen::Index i = 0; i < Ki - 1; ++i) {
    const double t = static_cast<double>(i + 1) / static_cast<double>(K_);
    for (Eigen::Index p = 0; p < Ni; ++p) {
      const auto pu = static_cast<std::size_t>(p);
      m_(i, p) = (1.0 - t) * m0_[pu] + t * mT_[pu];
    }
  }
  w_.assign(static_cast<std::size_t>(dim_), RowMat::Zero(Ki, Ni));
  rho_x_ = S_avg_ * m_ + b_rho_;
  rho_ = rho_x_;
  mu_ = m_;
  sig_ = w_;
  lrho_ = RowMat::Zero(Ki, Ni);
  lmu_ = RowMat::Zero(Ki - 1, Ni);
  lsig_.assign(static_cast<std::size_t>(dim_), RowMat::Zero(Ki, Ni));
  phi_ = RowMat::Zero(Ki, Ni);
}

void Admm::x_step() {
  const auto Ki = static_cast<Eigen::Index>(K_);
  const auto Si = static_cast<Eigen::Index>(S_);
  // Targets a = y - lambda.
  const RowMat a_rho = rho_ - lrho_;
  const RowMat a_mu = mu_ - lmu_;
  std::vector<RowMat> a_sig(static_cast<std::size_t>(dim_));
  for (std::size_t a = 0; a < a_sig.size(); ++a) a_sig[a] = sig_[a] - lsig_[a];

  const RowMat r_m = S_avg_.transpose() * (a_rho - b_rho_) + a_mu;
  RowMat rhs = P1_ * r_m + c_end_;

  // rhs += div a_sig, then transform: all in spectral space.
  CRowMat rhat(Ki, Si);
  std::vector<Complex> spec(S_), acc(S_);
  for (Eigen::Index j = 0; j < Ki; ++j) {
    ft_.forward(std::span<const double>(rhs.row(j).data(), N_), acc);
    for (int a = 0; a < dim_; ++a) {
      ft_.forward(std::span<const double>(a_sig[static_cast<std::size_t>(a)].row(j).data(), N_), spec);
      for (std::size_t s = 0; s < S_; ++s) acc[s] += Complex(0.0, ft_.derivative_symbol(a, s)) * spec[s];
    }
    for (std::size_t s = 0; s < S_; ++s) rhat(j, static_cast<Eigen::Index>(s)) = acc[s];
  }
  CRowMat coef = Q_.transpose().cast<Complex>() * rhat;
  const double scale = lambda_.maxCoeff() + kappa_.maxCoeff();
  for (Eigen::Index i = 0; i < Ki; ++i)
    for (Eigen::Index s = 0; s < Si; ++s) {
      const bool frozen = s > 0 && kappa_(s) == 0.0;
      const double den = lambda_(i) + kappa_(s);
      coef(i, s) = !frozen && den > 1e-12 * scale ? coef(i, s) / den : Complex(0.0, 0.0);
    }
  const CRowMat phat = Q_.cast<Complex>() * coef;

  std::vector<double> buf(N_);
  for (Eigen::Index j = 0; j < Ki; ++j) {
    for (std::size_t s = 0; s < S_; ++s) spec[s] = phat(j, static_cast<Eigen::Index>(s));
    ft_.inverse(spec, std::span<double>(phi_.row(j).data(), N_));
    for (int a = 0; a < dim_; ++a) {
      for (std::size_t s = 0; s < S_; ++s)
        acc[s] = Complex(0.0, ft_.derivative_symbol(a, s)) * phat(j, static_cast<Eigen::Index>(s));
      ft_.inverse(acc, buf);
      auto& wa = w_[static_cast<std::size_t>(a)];
      const auto& sa = a_sig[static_cast<std::size_t>(a)];
      for (std::size_t p = 0; p < N_; ++p) {
        const auto pi = static_cast<Eigen::Index>(p);
        wa(j, pi) = sa(j, pi) + buf[p];
      }
    }
  }
  m_ = Minv_ * r_m - P1_.transpose() * phi_;
  rho_x_ = S_avg_ * m_ + b_rho_;
}

void Admm::y_step() {
  const double beta = pb_.hamiltonian.beta();
  const auto Ki = static_cast<Eigen::Index>(K_);
  const auto Ni = static_cast<Eigen::Index>(N_);
#pragma omp parallel for num_threads(worker_count()) schedule(static)
  for (Eigen::Index j = 0; j < Ki; ++j) {
    for (Eigen::Index p = 0; p < Ni; ++p) {
      std::array<double, 2> b{0.0, 0.0};
      for (int a = 0; a < dim_; ++a) {
        const auto au = static_cast<std::size_t>(a);
        b[au] = w_[au](j, p) + lsig_[au](j, p);
      }
      const auto pr = kinetic_prox(rho_x_(j, p) + lrho_(j, p), b, r_, beta);
      rho_(j, p) = pr.rho;
      for (int a = 0; a < dim_; ++a) sig_[static_cast<std::size_t>(a)](j, p) = pr.w[static_cast<std::size_t>(a)];
    }
  }
#pragma omp parallel for num_threads(worker_count()) schedule(static)
  for (Eigen::Index i = 0; i < Ki - 1; ++i)
    for (Eigen::Index p = 0; p < Ni; ++p) mu_(i, p) = potential_prox(pb_.coupling, m_(i, p) + lmu_(i, p), r_);
}

double Admm::dual_update() {
  double primal = 0.0;
  RowMat d = rho_x_ - rho_;
  primal = std::max(primal, d.cwiseAbs().maxCoeff());
  lrho_ += d;
  d = m_ - mu_;
  primal = std::max(primal, d.cwiseAbs().maxCoeff());
  lmu_ += d;
  for (int a = 0; a < dim_; ++a) {
    const auto au = static_cast<std::size_t>(a);
    d = w_[au] - sig_[au];
    primal = std::max(primal, d.cwiseAbs().maxCoeff());
    lsig_[au] += d;
  }
  return primal;
}

void Admm::rescale_penalty(double factor) {
  r_ *= factor;
  lrho_ /= factor;
  lmu_ /= factor;
  for (auto& l : lsig_) l /= factor;
  phi_ /= factor;
}

void Admm::assemble_u(detail::Slices& u) const {
  // The continuity multiplier of the projection, rescaled by the penalty.
  u.assign(K_, std::vector<double>(N_));
  for (std::size_t j = 0; j < K_; ++j)
    for (std::size_t p = 0; p < N_; ++p) u[j][p] = -r_ * phi_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p));
  detail::gauge_fix(grid_, u);
}

detail::Slices Admm::full_m() const {
  detail::Slices m(K_ + 1, std::vector<double>(N_));
  m.front() = m0_.data();
  m.back() = mT_.data();
  for (std::size_t k = 1; k < K_; ++k)
    for (std::size_t p = 0; p < N_; ++p) m[k][p] = m_(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(p));
  return m;
}

std::vector<detail::Slices> Admm::half_w() const {
  std::vector<detail::Slices> w(K_, detail::Slices(static_cast<std::size_t>(dim_), std::vector<double>(N_)));
  for (std::size_t j = 0; j < K_; ++j)
    for (int a = 0; a < dim_; ++a)
      for (std::size_t p = 0; p < N_; ++p)
        w[j][static_cast<std::size_t>(a)][p] =
            w_[static_cast<std::size_t>(a)](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p));
  return w;
}

// Evaluated on the split variables, which always lie in the domain of the
// kinetic term.
double Admm::energy() const {
  const double beta = pb_.hamiltonian.beta();
  const double cell = grid_.cell_volume() * dt_;
  double kinetic = 0.0;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(K_); ++j)
    for (Eigen::Index p = 0; p < static_cast<Eigen::Index>(N_); ++p) {
      std::array<double, 2> w{0.0, 0.0};
      for (int a = 0; a < dim_; ++a) w[static_cast<std::size_t>(a)] = sig_[static_cast<std::size_t>(a)](j, p);
      kinetic += kinetic_density(rho_(j, p), w, beta);
    }
  double potential = 0.0;
  for (std::size_t p = 0; p < N_; ++p) potential += 0.5 * (pb_.coupling.G(m0_[p]) + pb_.coupling.G(mT_[p]));
  for (Eigen::Index i = 0; i < mu_.rows(); ++i)
    for (Eigen::Index p = 0; p < mu_.cols(); ++p) potential += pb_.coupling.G(mu_(i, p));
  return cell * (kinetic + potential);
}

SolveResult Admm::run() {
  SolveDiagnostics diag;
  diag.backend = "variational";
  detail::Slices u;
  std::size_t it = 0;
  for (it = 1; it <= prm_.max_iters; ++it) {
    const bool check = it % prm_.check_every == 0 || it == prm_.max_iters;
    x_step();
    if (check) {
      prev_rho_ = rho_;
      prev_mu_ = mu_;
      prev_sig_ = sig_;
    }
    y_step();
    const double primal = dual_update();
    if (check) {
      double dual = std::max((rho_ - prev_rho_).cwiseAbs().maxCoeff(), (mu_ - prev_mu_).cwiseAbs().maxCoeff());
      for (std::size_t a = 0; a < sig_.size(); ++a) dual = std::max(dual, (sig_[a] - prev_sig_[a]).cwiseAbs().maxCoeff());
      dual *= r_;
      assemble_u(u);
      double hj = 0.0, cont = 0.0;
      detail::staggered_kkt_norms(pb_, full_m(), u, hj, cont);
      const double res = std::max(primal, dual);
      diag.dual_residual = dual;
      diag.residual_history.push_back(res);
      diag.energy_history.push_back(energy());
      diag.hj_residual = hj;
      diag.continuity_residual = cont;
      diag.primal_residual = primal;
      if (res <= prm_.tol_residual) {
        diag.converged = true;
        break;
      }
      // Residual balancing. The x-step is a projection, so only the scaled
      // multipliers need rescaling.
      if (primal > 10.0 * dual) rescale_penalty(2.0);
      else if (dual > 10.0 * primal) rescale_penalty(0.5);
    }
  }
  diag.iterations = std::min(it, prm_.max_iters);
  diag.energy = energy();
  assemble_u(u);
  auto m = full_m();
  detail::repair_positivity(m);
  const auto w = half_w();
  auto traj = detail::assemble_trajectory(pb_, m, u, &w);
  if (!diag.converged) {
    std::ostringstream os;
    os << "variational solver did not converge in " << prm_.max_iters << " iterations (residual "
       << (diag.residual_history.empty() ? std::numeric_limits<double>::infinity() : diag.residual_history.back())
       << ", tol " << prm_.tol_residual << ")";
    diag.message = os.str();
    throw SolverFailure(diag.message, diag, std::move(traj));
  }
  diag.message = "converged";
  return {std::move(traj), std::move(diag)};
}

}  // namespace

SolveResult solve_planning_variational(const PlanningProblem& problem, const SolverParams& params) {
  problem.validate();
  params.validate();
  if (problem.alpha > 0.0) {
    throw InvalidArgument("variational backend requires alpha = 0; use the newton backend for congestion");
  }
  if (problem.coupling.kind() == Coupling::Kind::table) {
    const auto& z = problem.coupling.table_z();
    if (problem.coupling.monotonicity_margin(z.front(), z.back()) < -1e-12) {
      throw InvalidArgument("variational backend requires a non-decreasing coupling");
    }
  }
  Admm admm(problem, params);
  return admm.run();
}

}  // namespace mfgdc
