#pragma once

#include "ll/spectral.hpp"

namespace ll {

struct NlsOptions {
  /// Reject runs with dt * max(k)^2 above this phase-per-step guard.
  double stability_bound = 64.0;
};

/// Sampled solution of (i d_t + Laplacian) phi = kappa |phi|^2 phi.
struct NlsTrajectory {
  std::vector<double> times;
  std::vector<SpectralField> fields;
  int kappa = 1;
  /// Quadrature weight of one sample in the time direction.
  double sample_dt = 0.0;

  const SpectralField& at(std::size_t i) const { return fields.at(i); }
  std::size_t size() const { return fields.size(); }
};

/// Strang splitting: exact kinetic half-step in frequency space, exact
/// pointwise nonlinear phase in position space, kinetic half-step.
/// Mass is conserved to round-off by construction. kappa = 0 runs the
/// free Schroedinger flow (linear control).
NlsTrajectory nls_evolve(const SpectralField& phi0, int kappa, double t_final, double dt,
                         int sample_every, const NlsOptions& opts = {});

/// E = ||grad phi||^2 + (kappa/2) ||phi||_{L^4}^4.
double nls_energy(const SpectralField& phi, int kappa);

/// Discrete L^p-in-time of L^q-in-space over the sampled trajectory,
/// rectangle rule with weight sample_dt. Rejects non-admissible (p, q);
/// admissibility: 2/p = 1/2 - 1/q with 2 <= p, q <= infinity.
double strichartz_norm(const NlsTrajectory& traj, double p, double q);

struct DependenceReport {
  double sup_l2_gap = 0.0;     // sup_t ||phi - psi||_{L^2}
  double initial_gap = 0.0;    // ||phi0 - psi0||_{L^2}
  double bound = 0.0;          // initial_gap * exp(C sqrt(T) (S_phi^2 + S_psi^2))
  double strichartz_phi = 0.0; // L^4_t L^inf_x norm of phi over [0, T]
  double strichartz_psi = 0.0;
  double fitted_log_slope = 0.0;  // least-squares slope of log gap(t) vs t
};

/// Evolves both data with the same solver settings and reports the
/// sup-in-time L^2 gap next to the Lipschitz-dependence bound shape
/// evaluated at the caller-supplied constant C (never asserted).
DependenceReport dependence_gap(const SpectralField& phi0, const SpectralField& psi0, int kappa,
                                double t_final, double dt, int sample_every, double fit_constant,
                                const NlsOptions& opts = {});

/// P_{<= (log N)^eta} phi0, renormalized to unit mass. Rejects data whose
/// low-frequency part vanishes.
SpectralField mollify_initial_datum(const SpectralField& phi0, int n_particles, double eta);

/// The cutoff used by mollify_initial_datum.
double mollify_cutoff(int n_particles, double eta);

}  // namespace ll
