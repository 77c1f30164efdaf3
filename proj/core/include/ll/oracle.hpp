#pragma once

#include "ll/fock.hpp"
#include "ll/observables.hpp"

namespace ll {
namespace oracle {

/// Dense N-particle tensor on the K-mode window, laid out with particle 1
/// as the slowest index: entry (j_1, ..., j_N) sits at
/// j_1 K^{N-1} + ... + j_N. Brute-force reference for N <= 3, K <= 6.
struct TensorState {
  int particles = 0;
  ModeBasis modes;
  Vector amps;  // dimension K^N

  TensorState(int n, ModeBasis m, Vector a);
  long long dim() const { return amps.size(); }
  double norm() const { return amps.norm(); }
};

void check_size_guard(int particles, int num_modes);

/// Average over all N! permutations of particle labels (bosonic
/// symmetrizer; a projection, not an isometry).
TensorState symmetrize(const TensorState& psi);

/// Max-abs deviation from permutation symmetry.
double asymmetry(const TensorState& psi);

/// One-body operator B acting in particle slot j (1-based), identity on
/// the others.
TensorState apply_one_body_at(const TensorState& psi, const Matrix& b, int j);

/// p_j = |phi><phi| in slot j; q_j = 1 - p_j.
TensorState apply_pj(const TensorState& psi, const SpectralField& phi, int j);
TensorState apply_qj(const TensorState& psi, const SpectralField& phi, int j);

/// P_k as printed: the 2^N-term sum over alpha in {0,1}^N, |alpha| = k,
/// of prod_j p_j^{1-alpha_j} q_j^{alpha_j}. Zero operator outside 0..N.
TensorState apply_Pk(const TensorState& psi, const SpectralField& phi, int k);

/// fhat = sum_k f(k) P_k through the combinatorial projectors.
TensorState apply_hat(const TensorState& psi, const SpectralField& phi,
                      const std::function<double(long long)>& f);

/// Isometry between the symmetric tensor subspace and the occupation
/// basis; rejects non-symmetric input (message carries the asymmetry).
FockVector firstq_to_fock(const TensorState& psi, const FockBasis& basis);
TensorState fock_to_firstq(const FockVector& v);

/// Dense first-quantized H on the K^N tensor space: kinetic k^2 per leg
/// plus the window-projected pair potential with the same closed-form
/// transfer coefficients as the Fock build.
Matrix brute_hamiltonian(int particles, const ModeBasis& modes, const TwoBodyKernel& kernel,
                         int kappa);

/// Reference observables evaluated directly on the tensor state.
Matrix rdm1(const TensorState& psi);                       // K x K, unit trace
Matrix rdm2_pair_basis(const TensorState& psi);            // symmetric pair basis
std::vector<double> pk_weights(const TensorState& psi, const SpectralField& phi);
double alpha(const TensorState& psi, const SpectralField& phi);
double beta(const TensorState& psi, const SpectralField& phi);
double energy_per_particle(const TensorState& psi, const Matrix& hamiltonian);

/// Random normalized symmetric state from a seeded stream.
TensorState random_symmetric_state(int particles, const ModeBasis& modes, Rng& rng);

}  // namespace oracle
}  // namespace ll
