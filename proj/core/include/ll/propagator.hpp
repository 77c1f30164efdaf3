#pragma once

#include "ll/fock.hpp"

namespace ll {

struct PropagatorConfig {
  double dt = 0.01;          // sampling step for evolve()
  int krylov_dim = 30;       // Krylov subspace cap per substep
  double tol = 1e-10;        // per-substep error target, must be in (0, 1e-4]
  int max_substeps = 256;    // adaptive substep budget per step

  void validate() const;
};

/// exp(-i t H) Phi by Lanczos tridiagonalization with full
/// re-orthogonalization and residual-controlled adaptive substepping.
/// Krylov breakdown (invariant subspace) returns the converged result.
FockVector expm_apply(const SparseHermitian& hamiltonian, const FockVector& phi, double t,
                      const PropagatorConfig& cfg);

struct EvolutionSample {
  double t = 0.0;
  FockVector state;
  double norm_drift = 0.0;    // | ||Phi(t)|| - ||Phi(0)|| |
  double energy_drift = 0.0;  // relative to <Phi0, H Phi0>
};

/// Uniformly sampled unitary trajectory; cfg.dt is the sampling step and
/// controls only where samples land, not accuracy.
std::vector<EvolutionSample> evolve(const SparseHermitian& hamiltonian, const FockVector& phi0,
                                    double t_final, const PropagatorConfig& cfg,
                                    int sample_every = 1);

}  // namespace ll
