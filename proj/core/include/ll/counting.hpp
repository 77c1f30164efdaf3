#pragma once

#include <functional>
#include <iosfwd>

#include "ll/fock.hpp"

namespace ll {

/// Probabilities w_0..w_N that exactly k particles are not in the state
/// phi: w_k = <Phi, P_k Phi>, with P_k the eigenprojector of
/// N_phi = adag(phi) a(phi) at eigenvalue N - k.
struct CountingDistribution {
  int particles = 0;
  std::vector<double> weights;   // index k
  int clamped = 0;               // entries lifted from [-1e-10, 0) to 0
  std::string method;            // "moments" or "lagrange"

  double sum() const;
  /// sum (k/N) w_k
  double mean_fraction() const;
  /// sum sqrt(k/N) w_k
  double root_fraction() const;
};

/// Weighted counting function f: Z -> R with a name tag. Defined on all
/// of Z (shift identities evaluate f outside {0..N}); the tabulated view
/// restricts to {0..N}.
struct WeightFunction {
  std::function<double(long long)> f;
  std::string name;
  int particles = 0;

  double operator()(long long k) const { return f(k); }
  std::vector<double> tabulate() const;

  /// m_N(k) = (k/N) 1_{k >= 0}
  static WeightFunction m(int n);
  /// n_N(k) = sqrt(k/N) 1_{k >= 0}
  static WeightFunction n(int n);
  /// table over {0..N}, zero outside
  static WeightFunction from_table(std::vector<double> values, std::string name);
  static WeightFunction custom(std::function<double(long long)> f, std::string name, int n);
  /// (tau_s f)(k) = f(k + s)
  WeightFunction shifted(int s) const;
};

/// Moment/Vandermonde fast path with automatic fallback to Lagrange
/// eigenprojectors of N_phi; both failing raises NumericError. Guarded
/// to N <= 12 for conditioning.
CountingDistribution pk_distribution(const FockVector& phi_n, const SpectralField& phi);

/// The robust path on its own (Lagrange eigenprojectors applied to Phi).
CountingDistribution pk_distribution_lagrange(const FockVector& phi_n, const SpectralField& phi);

/// alpha_N = <Phi, mhat Phi> = sum (k/N) w_k, in [0, 1].
double alpha(const FockVector& phi_n, const SpectralField& phi);

/// beta_N = <Phi, nhat Phi> = sum sqrt(k/N) w_k, in [0, 1]; alpha <= beta.
double beta(const FockVector& phi_n, const SpectralField& phi);

double alpha_of(const CountingDistribution& dist);
double beta_of(const CountingDistribution& dist);

/// fhat Phi = sum_k f(k) P_k Phi via Lagrange eigenprojectors
/// prod_{j != N-k} (N_phi - j) / ((N-k) - j).
FockVector hat_apply(const WeightFunction& f, const FockVector& phi_n, const SpectralField& phi);

/// || grad_1 q_1 Phi ||^2 = (1/N) <Phi, dGamma(q T q) Phi> with T the
/// kinetic window matrix and q = 1 - |phi><phi|. Vanishes on the product
/// state in phi.
double grad_q1_norm(const FockVector& phi_n, const SpectralField& phi);

/// One CSV row per k: (k, w_k, n_N(k), m_N(k)).
void save_counting_distribution(std::ostream& out, const CountingDistribution& dist);

}  // namespace ll
