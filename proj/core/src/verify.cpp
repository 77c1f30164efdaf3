#include "ll/verify.hpp"

#include <cmath>
#include <sstream>

#include "ll/counting.hpp"
#include "ll/observables.hpp"
#include "ll/oracle.hpp"

namespace ll {

namespace {

using oracle::TensorState;

struct Fixture {
  TorusGrid grid;
  ModeBasis modes;
  FockBasis basis;
  Fixture(int n, int k, double length = 6.283185307179586, int points = 32)
      : grid(length, points), modes(grid, k), basis(enumerate_basis(n, modes)) {}
};

SpectralField random_window_field(const ModeBasis& modes, Rng& rng) {
  Vector c(modes.size());
  for (int p = 0; p < modes.size(); ++p) c(p) = rng.cnormal();
  c /= c.norm();
  return modes.unwindow(c);
}

FockVector random_fock_state(const FockBasis& basis, Rng& rng) {
  Vector a(basis.dim());
  for (long long i = 0; i < basis.dim(); ++i) a(i) = rng.cnormal();
  a /= a.norm();
  return FockVector(basis, std::move(a));
}

std::vector<double> random_nonneg_table(int n, Rng& rng) {
  std::vector<double> f(n + 4);
  for (double& v : f) v = rng.uniform(0.0, 2.0);
  return f;
}

cplx tensor_inner(const TensorState& a, const TensorState& b) { return a.amps.dot(b.amps); }

double worst_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// ---- suite: oracle equivalence -------------------------------------------

SuiteResult suite_oracle_equivalence(std::uint64_t seed, double tol) {
  SuiteResult res{"oracle_equivalence", 0.0, tol, 0};
  Rng rng(seed ^ 0xa11ce5u);
  for (int n : {2, 3}) {
    Fixture fx(n, 4);
    const TwoBodyKernel kernel = potential_coefficients(PotentialShape::Gaussian, 0.5, fx.modes);
    const SparseHermitian h_fock = build_hamiltonian(fx.basis, kernel, +1);
    const Matrix h_brute = oracle::brute_hamiltonian(n, fx.modes, kernel, +1);

    for (int trial = 0; trial < 25; ++trial) {
      const TensorState psi = oracle::random_symmetric_state(n, fx.modes, rng);
      const FockVector fv = oracle::firstq_to_fock(psi, fx.basis);
      const SpectralField phi = random_window_field(fx.modes, rng);
      auto track = [&res](double v) { res.worst = std::max(res.worst, v); };

      track(worst_abs(oracle::rdm1(psi) - rdm1(fv).mat));
      track(worst_abs(oracle::rdm2_pair_basis(psi) - rdm2(fv).mat));

      const auto wo = oracle::pk_weights(psi, phi);
      const auto dist = pk_distribution(fv, phi);
      for (int k = 0; k <= n; ++k) track(std::abs(wo[k] - dist.weights[k]));

      track(std::abs(oracle::alpha(psi, phi) - alpha_of(dist)));
      track(std::abs(oracle::beta(psi, phi) - beta_of(dist)));
      track(std::abs(oracle::energy_per_particle(psi, h_brute) - energy_per_particle(fv, h_fock)));
      ++res.cases;
    }
  }
  return res;
}

// ---- suite: projector-calculus lemmas --------------------------------------

SuiteResult suite_lemma_identities(std::uint64_t seed, double tol) {
  SuiteResult res{"weighted_count_identity", 0.0, tol, 0};
  Rng rng(seed ^ 0x1de4u);
  for (int n : {2, 3}) {
    Fixture fx(n, 4);
    for (int trial = 0; trial < 50; ++trial) {
      const TensorState psi = oracle::random_symmetric_state(n, fx.modes, rng);
      const SpectralField phi = random_window_field(fx.modes, rng);
      const auto ftab = random_nonneg_table(n, rng);
      auto f = [&ftab](long long k) {
        return k >= 0 && k < static_cast<long long>(ftab.size()) ? ftab[k] : 0.0;
      };
      auto fsqrt = [&f](long long k) { return std::sqrt(f(k)); };

      // (i)  ||fhat^{1/2} q_1 Psi||^2 = <Psi, fhat q_1 Psi> = <Psi, fhat mhat Psi>
      const TensorState q1psi = oracle::apply_qj(psi, phi, 1);
      const TensorState half = oracle::apply_hat(q1psi, phi, fsqrt);
      const double lhs = half.amps.squaredNorm();
      const double mid = std::real(tensor_inner(psi, oracle::apply_hat(q1psi, phi, f)));
      auto m_of = [n](long long k) { return k >= 0 ? double(k) / n : 0.0; };
      auto fm = [&f, m_of](long long k) { return f(k) * m_of(k); };
      const double rhs = std::real(tensor_inner(psi, oracle::apply_hat(psi, phi, fm)));
      res.worst = std::max({res.worst, std::abs(lhs - mid), std::abs(mid - rhs)});

      // Fock path computes the same scalar (spectral vs combinatorial P_k).
      const FockVector fv = oracle::firstq_to_fock(psi, fx.basis);
      const WeightFunction wf = WeightFunction::custom(fm, "f*m", n);
      const double rhs_fock =
          std::real(fv.amps.dot(hat_apply(wf, fv, phi).amps));
      res.worst = std::max(res.worst, std::abs(rhs - rhs_fock));

      // (ii) equality part: ||fhat^{1/2} q_1 q_2 Psi||^2 = <Psi, fhat q_1 q_2 Psi>
      const TensorState q12 = oracle::apply_qj(oracle::apply_qj(psi, phi, 1), phi, 2);
      const double lhs2 = oracle::apply_hat(q12, phi, fsqrt).amps.squaredNorm();
      const double mid2 = std::real(tensor_inner(psi, oracle::apply_hat(q12, phi, f)));
      res.worst = std::max(res.worst, std::abs(lhs2 - mid2));
      ++res.cases;
    }
  }
  return res;
}

SuiteResult suite_lemma_inequality(std::uint64_t seed, double slack) {
  SuiteResult res{"weighted_count_inequality", 0.0, slack, 0};
  Rng rng(seed ^ 0x1de5u);
  for (int n : {2, 3}) {
    Fixture fx(n, 4);
    for (int trial = 0; trial < 50; ++trial) {
      const TensorState psi = oracle::random_symmetric_state(n, fx.modes, rng);
      const SpectralField phi = random_window_field(fx.modes, rng);
      const auto ftab = random_nonneg_table(n, rng);
      auto f = [&ftab](long long k) {
        return k >= 0 && k < static_cast<long long>(ftab.size()) ? ftab[k] : 0.0;
      };
      auto m_of = [n](long long k) { return k >= 0 ? double(k) / n : 0.0; };
      auto fmm = [&f, m_of](long long k) { return f(k) * m_of(k) * m_of(k); };

      const TensorState q12 = oracle::apply_qj(oracle::apply_qj(psi, phi, 1), phi, 2);
      const double lhs = std::real(tensor_inner(psi, oracle::apply_hat(q12, phi, f)));
      const double rhs = double(n) / (n - 1) *
                         std::real(tensor_inner(psi, oracle::apply_hat(psi, phi, fmm)));
      res.worst = std::max(res.worst, lhs - rhs);  // violation when positive
      ++res.cases;
    }
  }
  return res;
}

SuiteResult suite_shift_identity(std::uint64_t seed, double tol) {
  SuiteResult res{"shift_identity", 0.0, tol, 0};
  Rng rng(seed ^ 0x5217u);
  for (int n : {2, 3}) {
    Fixture fx(n, 4);
    // one-body multiplication operator: 2 cos(2 pi x / L) projected to the
    // window is the nearest-neighbour shift matrix on mode positions
    Matrix mult = Matrix::Zero(4, 4);
    for (int p = 0; p + 1 < 4; ++p) {
      mult(p, p + 1) = 1.0;
      mult(p + 1, p) = 1.0;
    }
    for (int trial = 0; trial < 10; ++trial) {
      const TensorState psi = oracle::random_symmetric_state(n, fx.modes, rng);
      const SpectralField phi = random_window_field(fx.modes, rng);
      std::vector<double> ftab(n + 5);
      for (double& v : ftab) v = rng.uniform(-1.0, 1.0);
      auto f = [&ftab, n](long long k) {
        const long long i = k + 2;  // store f on {-2..N+2}
        return i >= 0 && i < static_cast<long long>(ftab.size()) ? ftab[i] : 0.0;
      };

      for (int q1_sel = 0; q1_sel < 2; ++q1_sel) {
        for (int q2_sel = 0; q2_sel < 2; ++q2_sel) {
          auto project = [&](const TensorState& s, int which) {
            return which ? oracle::apply_qj(s, phi, 1) : oracle::apply_pj(s, phi, 1);
          };
          const int shift = q2_sel - q1_sel;  // #q in Q_2 minus #q in Q_1
          auto f_shifted = [&f, shift](long long k) { return f(k + shift); };

          // Q_1 A_1 fhat Q_2 Psi
          TensorState lhs = project(psi, q2_sel);
          lhs = oracle::apply_hat(lhs, phi, f);
          lhs = oracle::apply_one_body_at(lhs, mult, 1);
          lhs = project(lhs, q1_sel);
          // Q_1 (tau_shift f)hat A_1 Q_2 Psi
          TensorState rhs = project(psi, q2_sel);
          rhs = oracle::apply_one_body_at(rhs, mult, 1);
          rhs = oracle::apply_hat(rhs, phi, f_shifted);
          rhs = project(rhs, q1_sel);

          res.worst = std::max(res.worst, (lhs.amps - rhs.amps).cwiseAbs().maxCoeff());
          ++res.cases;
        }
      }
    }
  }
  return res;
}

SuiteResult suite_projector_algebra_exact(std::uint64_t seed, double tol) {
  SuiteResult res{"projector_algebra_oracle", 0.0, tol, 0};
  Rng rng(seed ^ 0xa19e6u);
  for (int n : {2, 3}) {
    Fixture fx(n, 4);
    for (int trial = 0; trial < 10; ++trial) {
      const TensorState psi = oracle::random_symmetric_state(n, fx.modes, rng);
      const SpectralField phi = random_window_field(fx.modes, rng);

      // completeness
      Vector sum = Vector::Zero(psi.dim());
      std::vector<TensorState> pk;
      for (int k = 0; k <= n; ++k) {
        pk.push_back(oracle::apply_Pk(psi, phi, k));
        sum += pk.back().amps;
      }
      res.worst = std::max(res.worst, (sum - psi.amps).cwiseAbs().maxCoeff());

      // mutual orthogonality / idempotence
      for (int k = 0; k <= n; ++k) {
        for (int l = 0; l <= n; ++l) {
          const TensorState plk = oracle::apply_Pk(pk[l], phi, k);
          const Vector expect = (k == l) ? pk[k].amps : Vector::Zero(psi.dim()).eval();
          res.worst = std::max(res.worst, (plk.amps - expect).cwiseAbs().maxCoeff());
        }
      }

      // [p_j, P_k] = 0
      for (int k = 0; k <= n; ++k) {
        const TensorState a = oracle::apply_pj(pk[k], phi, 1);
        const TensorState b = oracle::apply_Pk(oracle::apply_pj(psi, phi, 1), phi, k);
        res.worst = std::max(res.worst, (a.amps - b.amps).cwiseAbs().maxCoeff());
      }
      ++res.cases;
    }
  }
  return res;
}

SuiteResult suite_projector_algebra_spectral(std::uint64_t seed, double tol) {
  SuiteResult res{"projector_algebra_spectral", 0.0, tol, 0};
  Rng rng(seed ^ 0x59ec7u);
  Fixture fx(5, 6);
  for (int trial = 0; trial < 10; ++trial) {
    const FockVector fv = random_fock_state(fx.basis, rng);
    const SpectralField phi = random_window_field(fx.modes, rng);
    const int n = fx.basis.particles();

    Vector sum = Vector::Zero(fv.amps.size());
    std::vector<FockVector> pk;
    for (int k = 0; k <= n; ++k) {
      std::vector<double> ind(n + 1, 0.0);
      ind[k] = 1.0;
      pk.push_back(hat_apply(WeightFunction::from_table(ind, "1_k"), fv, phi));
      sum += pk.back().amps;
    }
    res.worst = std::max(res.worst, (sum - fv.amps).cwiseAbs().maxCoeff());
    for (int k = 0; k <= n; ++k) {
      for (int l = k; l <= n; ++l) {
        const cplx ip = pk[k].amps.dot(pk[l].amps);
        const double expect = (k == l) ? pk[k].amps.squaredNorm() : 0.0;
        res.worst = std::max(res.worst, std::abs(ip - expect));
      }
    }
    ++res.cases;
  }
  return res;
}

// ---- suite: sandwich and k-from-1 ------------------------------------------

Matrix random_density_matrix(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = rng.cnormal();
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

SuiteResult suite_sandwich(std::uint64_t seed, double slack) {
  SuiteResult res{"trace_norm_sandwich", 0.0, slack, 0};
  Rng rng(seed ^ 0x5a4dull);
  {
    Fixture fx(2, 6);
    for (int trial = 0; trial < 100; ++trial) {
      DensityMatrix gamma(1, fx.modes, random_density_matrix(6, rng));
      const SpectralField phi = random_window_field(fx.modes, rng);
      const SandwichReport rep = sandwich_check(gamma, phi);
      res.worst = std::max({res.worst, rep.lower - rep.gap, rep.gap - rep.upper});
      ++res.cases;
    }
  }
  {
    Fixture fx(2, 4);
    for (int trial = 0; trial < 100; ++trial) {
      DensityMatrix gamma(2, fx.modes, random_density_matrix(10, rng));
      const SpectralField phi = random_window_field(fx.modes, rng);
      const SandwichReport rep = sandwich_check(gamma, phi);
      res.worst = std::max({res.worst, rep.lower - rep.gap, rep.gap - rep.upper});
      ++res.cases;
    }
  }
  return res;
}

SuiteResult suite_k_from_one(std::uint64_t seed, double slack) {
  SuiteResult res{"k_from_one_reduction", 0.0, slack, 0};
  Rng rng(seed ^ 0x2f01ull);
  for (int n : {3, 4}) {
    Fixture fx(n, 4);
    for (int trial = 0; trial < 25; ++trial) {
      const FockVector fv = random_fock_state(fx.basis, rng);
      const SpectralField phi = random_window_field(fx.modes, rng);
      const DensityMatrix g1 = rdm1(fv);
      const DensityMatrix g2 = rdm2(fv);
      const KFromOneReport rep = k_from_one_check(g1, g2, phi, 2);
      res.worst = std::max({res.worst, rep.partial_trace_defect, rep.lhs - rep.rhs});
      ++res.cases;
    }
  }
  return res;
}

// ---- suite: counting self-consistency ---------------------------------------

SuiteResult suite_counting(std::uint64_t seed, double tol) {
  SuiteResult res{"counting_consistency", 0.0, tol, 0};
  Rng rng(seed ^ 0xc0117ull);
  for (int n : {4, 6}) {
    Fixture fx(n, 6);
    for (int trial = 0; trial < 10; ++trial) {
      const FockVector fv = random_fock_state(fx.basis, rng);
      const SpectralField phi = random_window_field(fx.modes, rng);
      const CountingDistribution dist = pk_distribution(fv, phi);
      const CountingDistribution robust = pk_distribution_lagrange(fv, phi);
      for (int k = 0; k <= n; ++k) {
        res.worst = std::max(res.worst, std::abs(dist.weights[k] - robust.weights[k]));
      }
      res.worst = std::max(res.worst, std::abs(dist.sum() - 1.0));
      // counting identity: alpha = 1 - <phi, gamma^(1) phi>
      const double a = alpha_of(dist);
      const double fid = fidelity(rdm1(fv), phi);
      res.worst = std::max(res.worst, std::abs(a - (1.0 - fid)));
      // monotone pair alpha <= beta <= sqrt(alpha)
      const double b = beta_of(dist);
      res.worst = std::max({res.worst, a - b, b - std::sqrt(std::max(0.0, a))});
      // fhat ghat = (fg)hat on random tables
      const auto ft = random_nonneg_table(n, rng);
      const auto gt = random_nonneg_table(n, rng);
      auto f = WeightFunction::from_table({ft.begin(), ft.begin() + n + 1}, "f");
      auto g = WeightFunction::from_table({gt.begin(), gt.begin() + n + 1}, "g");
      std::vector<double> fg(n + 1);
      for (int k = 0; k <= n; ++k) fg[k] = ft[k] * gt[k];
      const FockVector lhs = hat_apply(f, hat_apply(g, fv, phi), phi);
      const FockVector rhs = hat_apply(WeightFunction::from_table(fg, "fg"), fv, phi);
      res.worst = std::max(res.worst, (lhs.amps - rhs.amps).cwiseAbs().maxCoeff());
      ++res.cases;
    }
  }
  return res;
}

// ---- suite: partial Hoelder continuity --------------------------------------

SuiteResult suite_hoelder(std::uint64_t seed, double factor) {
  SuiteResult res{"hoelder_half_bound", 0.0, factor, 0};
  Rng rng(seed ^ 0x401dull);
  const TorusGrid grid(12.566370614359172, 64);
  for (int trial = 0; trial < 100; ++trial) {
    // band-limited: top 25% of mode magnitudes empty
    cvec modes(64, cplx(0.0));
    const int cut = 64 / 2 * 3 / 4;  // |n| < 24
    for (int i = 0; i < 64; ++i) {
      const int n = grid.mode_of_index(i);
      if (std::abs(n) < cut) modes[i] = rng.cnormal();
    }
    SpectralField phi = SpectralField::from_modes(grid, modes);
    const double semi = hoelder_half_seminorm(phi);
    double grad2 = 0.0;
    const cvec c = phi.to_modes();
    for (int i = 0; i < 64; ++i) {
      const double k = grid.wavenumber(i);
      grad2 += k * k * std::norm(c[i]);
    }
    const double ratio = semi / std::sqrt(grad2);
    res.worst = std::max(res.worst, ratio);
    ++res.cases;
  }
  return res;
}

}  // namespace

VerifyReport run_verification(std::uint64_t seed, const VerifyTolerances& tol) {
  VerifyReport rep;
  rep.suites.push_back(suite_oracle_equivalence(seed, tol.oracle_equivalence));
  rep.suites.push_back(suite_lemma_identities(seed, tol.lemma_identity));
  rep.suites.push_back(suite_lemma_inequality(seed, tol.inequality_slack));
  rep.suites.push_back(suite_shift_identity(seed, tol.lemma_identity));
  rep.suites.push_back(suite_projector_algebra_exact(seed, tol.projector_exact));
  rep.suites.push_back(suite_projector_algebra_spectral(seed, tol.lemma_identity));
  rep.suites.push_back(suite_sandwich(seed, tol.inequality_slack));
  rep.suites.push_back(suite_k_from_one(seed, tol.inequality_slack));
  rep.suites.push_back(suite_counting(seed, tol.counting_consistency));
  rep.suites.push_back(suite_hoelder(seed, tol.hoelder_factor));
  return rep;
}

std::string format_verify_report(const VerifyReport& report) {
  std::ostringstream out;
  for (const auto& s : report.suites) {
    out << (s.pass() ? "PASS" : "FAIL") << "  " << s.name << "  worst = " << s.worst
        << "  tol = " << s.tol << "  cases = " << s.cases << "\n";
  }
  out << (report.all_pass() ? "verification OK" : "verification FAILED") << "\n";
  return out.str();
}

}  // namespace ll
