#include "ll/observables.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>
#include <sstream>

namespace ll {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

int pair_index(int a, int b, int k) {
  // a <= b; row-major over the upper triangle
  return a * k - a * (a - 1) / 2 + (b - a);
}

double pair_weight(int a, int b) { return a == b ? 1.0 : kSqrt2; }

}  // namespace

DensityMatrix::DensityMatrix(int k, ModeBasis m, Matrix values)
    : order(k), modes(std::move(m)), mat(std::move(values)) {
  if (order != 1 && order != 2) throw std::invalid_argument("DensityMatrix: order must be 1 or 2");
  const long long expect = order == 1 ? modes.size()
                                      : static_cast<long long>(modes.size()) * (modes.size() + 1) / 2;
  if (mat.rows() != expect || mat.cols() != expect) {
    throw std::invalid_argument("DensityMatrix: dimension does not match the mode window");
  }
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityMatrix rdm1(const FockVector& phi) {
  const FockBasis& basis = phi.basis;
  const int k = basis.modes().size();
  const int n = basis.particles();
  Matrix gamma = Matrix::Zero(k, k);
  std::vector<int> occ;
  // <adag_q a_p> accumulated state by state
  for (long long col = 0; col < basis.dim(); ++col) {
    const cplx amp = phi.amps(col);
    if (amp == 0.0) continue;
    occ = basis.occupation(col);
    for (int p = 0; p < k; ++p) {
      if (occ[p] == 0) continue;
      const double fp = std::sqrt(double(occ[p]));
      occ[p] -= 1;
      for (int q = 0; q < k; ++q) {
        occ[q] += 1;
        const double fq = std::sqrt(double(occ[q]));
        gamma(p, q) += std::conj(phi.amps(basis.index_of(occ))) * fp * fq * amp;
        occ[q] -= 1;
      }
      occ[p] += 1;
    }
  }
  gamma /= double(n);
  return DensityMatrix(1, basis.modes(), std::move(gamma));
}

DensityMatrix rdm2(const FockVector& phi) {
  const FockBasis& basis = phi.basis;
  const int k = basis.modes().size();
  const int n = basis.particles();
  if (n < 2) throw std::invalid_argument("rdm2: needs at least two particles");

  const int pd = k * (k + 1) / 2;
  Matrix gamma = Matrix::Zero(pd, pd);
  std::vector<int> occ;
  // <adag_c adag_d a_b a_a>: annihilate the unordered pair {a, b} from the
  // source state, create the unordered pair {c, d} and look the target up.
  for (long long col = 0; col < basis.dim(); ++col) {
    const cplx amp = phi.amps(col);
    if (amp == 0.0) continue;
    occ = basis.occupation(col);
    for (int a = 0; a < k; ++a) {
      if (occ[a] == 0) continue;
      for (int b = a; b < k; ++b) {
        if (occ[b] == 0 || (b == a && occ[a] < 2)) continue;
        // a_b a_a with a <= b; the symmetric-basis weight collects the
        // (a, b) + (b, a) kernel entries.
        const double ann = std::sqrt(double(occ[a]) * (a == b ? occ[a] - 1 : occ[b]));
        occ[a] -= 1;
        occ[b] -= 1;
        const int row = pair_index(a, b, k);
        const double wrow = pair_weight(a, b);
        for (int c = 0; c < k; ++c) {
          occ[c] += 1;
          const double f1 = std::sqrt(double(occ[c]));
          for (int d = c; d < k; ++d) {
            occ[d] += 1;
            const double f2 = std::sqrt(double(occ[d]));
            const long long tgt = basis.index_of(occ);
            const int colp = pair_index(c, d, k);
            gamma(row, colp) +=
                wrow * pair_weight(c, d) * std::conj(phi.amps(tgt)) * ann * f1 * f2 * amp;
            occ[d] -= 1;
          }
          occ[c] -= 1;
        }
        occ[a] += 1;
        occ[b] += 1;
      }
    }
  }
  gamma /= double(n) * (n - 1);
  return DensityMatrix(2, basis.modes(), std::move(gamma));
}

DensityMatrix partial_trace(const DensityMatrix& gamma2) {
  if (gamma2.order != 2) throw std::invalid_argument("partial_trace: expected a 2-RDM");
  const int k = gamma2.modes.size();
  Matrix out = Matrix::Zero(k, k);
  for (int p = 0; p < k; ++p) {
    for (int r = 0; r < k; ++r) {
      cplx s = 0.0;
      for (int b = 0; b < k; ++b) {
        // kernel((p,b),(r,b)) from the weighted symmetric storage
        const int i = pair_index(std::min(p, b), std::max(p, b), k);
        const int j = pair_index(std::min(r, b), std::max(r, b), k);
        s += gamma2.mat(i, j) / (pair_weight(std::min(p, b), std::max(p, b)) *
                                 pair_weight(std::min(r, b), std::max(r, b)));
      }
      out(p, r) = s;
    }
  }
  return DensityMatrix(1, gamma2.modes, std::move(out));
}

Vector product_vector_in(const DensityMatrix& gamma, const SpectralField& phi) {
  const Vector c = gamma.modes.window_normalized(phi);
  if (gamma.order == 1) return c;
  const int k = gamma.modes.size();
  Vector v(k * (k + 1) / 2);
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) v(pair_index(a, b, k)) = pair_weight(a, b) * c(a) * c(b);
  }
  return v;
}

double trace_norm_gap(const DensityMatrix& gamma, const SpectralField& phi) {
  const Vector v = product_vector_in(gamma, phi);
  Matrix diff = gamma.mat - v * v.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double fidelity(const DensityMatrix& gamma, const SpectralField& phi) {
  const Vector v = product_vector_in(gamma, phi);
  const double f = (v.adjoint() * gamma.mat * v).value().real();
  if (f < -1e-10 || f > 1.0 + 1e-10) {
    std::ostringstream msg;
    msg << "fidelity: quadratic form " << f << " outside [0, 1] beyond tolerance";
    throw NumericError(msg.str());
  }
  return std::min(1.0, std::max(0.0, f));
}

double pure_state_trace_gap(const SpectralField& u, const SpectralField& v) {
  // Orthonormalize {u, v_perp}; both projectors act inside the span.
  const cplx uv = inner(u, v);
  const double mu = u.mass(), mv = v.mass();
  if (!(mu > 0.0) || !(mv > 0.0)) throw std::invalid_argument("pure_state_trace_gap: zero field");
  Eigen::Matrix2cd pu = Eigen::Matrix2cd::Zero(), pv = Eigen::Matrix2cd::Zero();
  pu(0, 0) = 1.0;
  const cplx a = uv / std::sqrt(mu * mv);           // <u, v> for unit vectors
  const double b2 = std::max(0.0, 1.0 - std::norm(a));
  const double b = std::sqrt(b2);
  // v = a u + b w with <u, w> = 0
  pv(0, 0) = std::norm(a);
  pv(0, 1) = a * b;
  pv(1, 0) = std::conj(a) * b;
  pv(1, 1) = b2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(pu - pv, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

SandwichReport sandwich_check(const DensityMatrix& gamma, const SpectralField& phi) {
  SandwichReport rep;
  rep.gap = trace_norm_gap(gamma, phi);
  const double f = fidelity(gamma, phi);
  rep.lower = 1.0 - f;
  rep.upper = std::sqrt(8.0 * std::max(0.0, 1.0 - f));
  return rep;
}

KFromOneReport k_from_one_check(const DensityMatrix& gamma1, const DensityMatrix& gammak,
                                const SpectralField& phi, int k) {
  if (k != 2) throw std::invalid_argument("k_from_one_check: only k = 2 is supported");
  if (gamma1.order != 1 || gammak.order != 2) {
    throw std::invalid_argument("k_from_one_check: wrong RDM orders");
  }
  KFromOneReport rep;
  rep.partial_trace_defect =
      (partial_trace(gammak).mat - gamma1.mat).cwiseAbs().maxCoeff();
  rep.lhs = 1.0 - fidelity(gammak, phi);
  rep.rhs = k * (1.0 - fidelity(gamma1, phi));
  return rep;
}

double energy_per_particle(const FockVector& phi, const SparseHermitian& hamiltonian) {
  if (hamiltonian.rows() != phi.basis.dim()) {
    throw std::invalid_argument("energy_per_particle: dimension mismatch");
  }
  const cplx e = phi.amps.dot(hamiltonian * phi.amps);
  return e.real() / phi.basis.particles();
}

void save_density_matrix(std::ostream& out, const DensityMatrix& gamma) {
  const char magic[8] = {'L', 'L', 'R', 'D', 'M', '0', '1', 0};
  const char ordering[8] = {'r', 'o', 'w', 'm', 'a', 'j', 0, 0};
  out.write(magic, sizeof(magic));
  const std::uint32_t k32 = static_cast<std::uint32_t>(gamma.order);
  const std::uint32_t modes32 = static_cast<std::uint32_t>(gamma.modes.size());
  out.write(reinterpret_cast<const char*>(&k32), sizeof(k32));
  out.write(reinterpret_cast<const char*>(&modes32), sizeof(modes32));
  out.write(ordering, sizeof(ordering));
  for (long long i = 0; i < gamma.mat.rows(); ++i) {
    for (long long j = 0; j < gamma.mat.cols(); ++j) {
      const double re = gamma.mat(i, j).real();
      const double im = gamma.mat(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
  if (!out) throw ConfigError("rdm export: write failed");
}

}  // namespace ll
