#pragma once

#include <iosfwd>

#include "ll/fock.hpp"

namespace ll {

/// Hermitian, unit-trace k-particle reduced density matrix on the mode
/// window. k = 1 acts on the K modes; k = 2 acts on the symmetric pair
/// basis |(a,b)>, a <= b, of dimension K(K+1)/2.
struct DensityMatrix {
  int order = 1;
  ModeBasis modes;
  Matrix mat;

  DensityMatrix(int k, ModeBasis m, Matrix values);

  long long dim() const { return mat.rows(); }
  double trace_real() const { return mat.trace().real(); }
  double hermiticity_defect() const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const;
};

/// gamma^(1)_{pq} = <adag_q a_p> / N.
DensityMatrix rdm1(const FockVector& phi);

/// gamma^(2) on the symmetric pair basis, elements
/// w_ab w_cd <adag_c adag_d a_b a_a> / (N(N-1)) with w_ab = sqrt(2) for
/// a < b and 1 for a = b. Requires N >= 2.
DensityMatrix rdm2(const FockVector& phi);

/// Tr_2 of a 2-RDM as a 1-RDM on the same window.
DensityMatrix partial_trace(const DensityMatrix& gamma2);

/// Coefficients of phi^{(x) k} in gamma's basis (unit vector); phi is
/// windowed and renormalized first.
Vector product_vector_in(const DensityMatrix& gamma, const SpectralField& phi);

/// Tr | gamma - |phi^{(x) k}><phi^{(x) k}| | as the absolute eigenvalue
/// sum of the Hermitian difference. Value in [0, 2].
double trace_norm_gap(const DensityMatrix& gamma, const SpectralField& phi);

/// <phi^{(x) k}, gamma phi^{(x) k}> clamped into [0, 1]; values outside
/// [-1e-10, 1 + 1e-10] raise NumericError.
double fidelity(const DensityMatrix& gamma, const SpectralField& phi);

/// Trace norm of the difference of two pure-state projectors |u><u|,
/// |v><v| for unit fields, computed from a 2x2 Gram construction.
double pure_state_trace_gap(const SpectralField& u, const SpectralField& v);

struct SandwichReport {
  double lower = 0.0;  // 1 - fidelity
  double gap = 0.0;    // trace norm
  double upper = 0.0;  // sqrt(8 (1 - fidelity))
  bool holds(double slack = 1e-10) const {
    return lower <= gap + slack && gap <= upper + slack;
  }
  double margin() const { return std::min(gap - lower, upper - gap); }
};

/// Checks 1 - fid <= Tr|gamma - proj| <= sqrt(8 (1 - fid)).
SandwichReport sandwich_check(const DensityMatrix& gamma, const SpectralField& phi);

struct KFromOneReport {
  double partial_trace_defect = 0.0;  // hypothesis check, max-abs entry
  double lhs = 0.0;                   // 1 - <phi^k, gamma^(k) phi^k>
  double rhs = 0.0;                   // k (1 - <phi, gamma^(1) phi>)
  bool hypothesis_ok(double tol = 1e-10) const { return partial_trace_defect <= tol; }
  bool holds(double slack = 1e-10) const { return lhs <= rhs + slack; }
  double margin() const { return rhs - lhs; }
};

/// 1 - <phi^{(x)k}, gamma^(k) phi^{(x)k}> <= k (1 - <phi, gamma^(1) phi>),
/// with the partial-trace hypothesis Tr_2 gamma^(2) = gamma^(1) checked
/// and reported separately. Only k = 2 is supported.
KFromOneReport k_from_one_check(const DensityMatrix& gamma1, const DensityMatrix& gammak,
                                const SpectralField& phi, int k);

/// (1/N) <Phi, H Phi> for normalized Phi.
double energy_per_particle(const FockVector& phi, const SparseHermitian& hamiltonian);

/// Binary export: header (k, K, ordering tag), then row-major (re, im)
/// little-endian f64 pairs.
void save_density_matrix(std::ostream& out, const DensityMatrix& gamma);

}  // namespace ll
