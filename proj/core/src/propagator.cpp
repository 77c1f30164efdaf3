#include "ll/propagator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace ll {

void PropagatorConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("PropagatorConfig: dt must be positive");
  if (krylov_dim < 2) throw ConfigError("PropagatorConfig: krylov_dim must be >= 2");
  if (!(tol > 0.0) || tol > 1e-4) throw ConfigError("PropagatorConfig: tol must be in (0, 1e-4]");
  if (max_substeps < 1) throw ConfigError("PropagatorConfig: max_substeps must be >= 1");
}

namespace {

struct LanczosFactorization {
  Matrix basis;                // n x m orthonormal columns
  Eigen::VectorXd alpha;       // m diagonal entries
  Eigen::VectorXd beta;        // m-1 off-diagonal + residual coupling at [m-1]
  int m = 0;
  bool breakdown = false;      // Krylov space is H-invariant
};

LanczosFactorization lanczos(const SparseHermitian& h, const Vector& v, int max_dim) {
  const long long n = v.size();
  const double scale = v.norm();
  LanczosFactorization f;
  f.basis.resize(n, std::min<long long>(max_dim, n));
  f.alpha.resize(f.basis.cols());
  f.beta.resize(f.basis.cols());

  Vector w = v / scale;
  f.basis.col(0) = w;
  for (int j = 0; j < f.basis.cols(); ++j) {
    w = h * f.basis.col(j);
    const double a = std::real(f.basis.col(j).dot(w));
    f.alpha(j) = a;
    w -= a * f.basis.col(j);
    if (j > 0) w -= f.beta(j - 1) * f.basis.col(j - 1);
    // full re-orthogonalization, twice for good measure
    for (int pass = 0; pass < 2; ++pass) {
      w -= f.basis.leftCols(j + 1) * (f.basis.leftCols(j + 1).adjoint() * w);
    }
    const double b = w.norm();
    f.m = j + 1;
    f.beta(j) = b;
    if (b <= 1e-14 * std::max(1.0, std::abs(a))) {
      f.breakdown = true;
      break;
    }
    if (j + 1 < f.basis.cols()) f.basis.col(j + 1) = w / b;
  }
  return f;
}

/// exp(-i tau T) e_1 for the real symmetric tridiagonal T.
Vector tridiag_exp_e1(const LanczosFactorization& f, double tau) {
  const int m = f.m;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    t(j, j) = f.alpha(j);
    if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = f.beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const Eigen::VectorXd q1 = es.eigenvectors().row(0).transpose();
  Vector y(m);
  for (int j = 0; j < m; ++j) {
    cplx acc = 0.0;
    for (int l = 0; l < m; ++l) {
      acc += es.eigenvectors()(j, l) * std::polar(1.0, -tau * es.eigenvalues()(l)) * q1(l);
    }
    y(j) = acc;
  }
  return y;
}

}  // namespace

FockVector expm_apply(const SparseHermitian& hamiltonian, const FockVector& phi, double t,
                      const PropagatorConfig& cfg) {
  cfg.validate();
  if (hamiltonian.rows() != phi.basis.dim()) {
    throw std::invalid_argument("expm_apply: Hamiltonian does not match the basis");
  }
  const double scale0 = phi.norm();
  if (!(scale0 > 0.0)) throw std::invalid_argument("expm_apply: zero state");
  if (t == 0.0) return phi;

  Vector v = phi.amps;
  const double sign = t > 0.0 ? 1.0 : -1.0;
  double remaining = std::abs(t);
  int substeps = 0;

  while (remaining > 0.0) {
    if (++substeps > cfg.max_substeps) {
      std::ostringstream msg;
      msg << "expm_apply: no convergence within " << cfg.max_substeps
          << " substeps (remaining time " << sign * remaining << " of " << t << ", Krylov dim "
          << cfg.krylov_dim << ", tol " << cfg.tol << ")";
      throw NumericError(msg.str());
    }
    const double vnorm = v.norm();
    const LanczosFactorization f = lanczos(hamiltonian, v, cfg.krylov_dim);

    double h = remaining;
    Vector y;
    for (;;) {
      y = tridiag_exp_e1(f, sign * h);
      if (f.breakdown) break;  // exact on the invariant subspace
      // Saad's residual estimate: coupling out of the Krylov space is
      // beta_m times the last component of the small solution. The budget
      // is prorated by substep length so the whole step meets cfg.tol.
      const double err = f.beta(f.m - 1) * std::abs(y(f.m - 1));
      if (err <= cfg.tol * (h / std::abs(t))) break;
      h *= 0.5;
      if (!(h > 0.0)) throw NumericError("expm_apply: substep underflow");
    }
    v = f.basis.leftCols(f.m) * (vnorm * y);
    remaining -= h;
  }
  return FockVector(phi.basis, std::move(v));
}

std::vector<EvolutionSample> evolve(const SparseHermitian& hamiltonian, const FockVector& phi0,
                                    double t_final, const PropagatorConfig& cfg,
                                    int sample_every) {
  cfg.validate();
  if (sample_every < 1) throw std::invalid_argument("evolve: sample_every must be >= 1");
  if (t_final < 0.0) throw std::invalid_argument("evolve: t_final must be >= 0");

  const long long n_steps = static_cast<long long>(std::llround(t_final / cfg.dt));
  const double norm0 = phi0.norm();
  const double e0 = phi0.amps.dot(hamiltonian * phi0.amps).real();

  std::vector<EvolutionSample> out;
  out.push_back({0.0, phi0, 0.0, 0.0});

  FockVector cur = phi0;
  for (long long step = 1; step <= n_steps; ++step) {
    cur = expm_apply(hamiltonian, cur, cfg.dt, cfg);
    if (step % sample_every == 0 || step == n_steps) {
      EvolutionSample s{step * cfg.dt, cur, 0.0, 0.0};
      s.norm_drift = std::abs(cur.norm() - norm0);
      const double e = cur.amps.dot(hamiltonian * cur.amps).real();
      s.energy_drift = std::abs(e - e0) / (std::abs(e0) + 1.0);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace ll
