#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <memory>

#include "ll/spectral.hpp"

namespace ll {

using SparseHermitian = Eigen::SparseMatrix<cplx>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Galerkin window of K plane-wave modes e_p(x) = e^{i k x}/sqrt(L) with
/// mode integers n_p = p - K/2, p = 0..K-1 (ascending frequency).
class ModeBasis {
 public:
  ModeBasis(TorusGrid grid, int num_modes);

  const TorusGrid& grid() const { return grid_; }
  int size() const { return num_modes_; }
  int mode_integer(int p) const { return p - num_modes_ / 2; }
  double wavenumber(int p) const;
  /// Window position of a signed mode integer, or -1 if outside.
  int position_of_mode(int n) const {
    const int p = n + num_modes_ / 2;
    return (p >= 0 && p < num_modes_) ? p : -1;
  }

  /// Mode e_p sampled on the grid.
  SpectralField mode_field(int p) const;

  /// Coefficients of phi restricted to the window (no renormalization).
  Vector window(const SpectralField& phi) const;
  /// Window and renormalize; rejects zero windowed norm.
  Vector window_normalized(const SpectralField& phi) const;
  /// Lift window coefficients back to a grid field.
  SpectralField unwindow(const Vector& coeffs) const;

  bool same_as(const ModeBasis& other) const {
    return num_modes_ == other.num_modes_ && grid_.same_as(other.grid_);
  }

 private:
  TorusGrid grid_;
  int num_modes_;
};

/// Enumeration of bosonic occupation vectors (n_1, ..., n_K) with
/// sum n_p = N, ordered lexicographically with the first mode's count
/// descending: (N,0,...,0) first, (0,...,0,N) last. Immutable, shared.
class FockBasis {
 public:
  static constexpr long long kDefaultDimensionCap = 5'000'000;

  int particles() const { return impl_->particles; }
  const ModeBasis& modes() const { return impl_->modes; }
  long long dim() const { return static_cast<long long>(impl_->occupations.size()); }
  const std::vector<int>& occupation(long long i) const { return impl_->occupations[i]; }
  /// Rank of an occupation vector in the basis order.
  long long index_of(const std::vector<int>& occ) const;

  bool same_as(const FockBasis& other) const { return impl_ == other.impl_; }

  friend FockBasis enumerate_basis(int particles, const ModeBasis& modes, long long dim_cap);

 private:
  struct Impl {
    int particles;
    ModeBasis modes;
    std::vector<std::vector<int>> occupations;
    std::vector<std::vector<long long>> binom;  // Pascal table for ranking
  };
  std::shared_ptr<const Impl> impl_;
};

/// Builds the occupation basis; throws ConfigError when the dimension
/// binomial(N+K-1, K-1) exceeds dim_cap (message carries the dimension).
FockBasis enumerate_basis(int particles, const ModeBasis& modes,
                          long long dim_cap = FockBasis::kDefaultDimensionCap);

long long fock_dimension(int particles, int num_modes);

/// Complex amplitude vector over a FockBasis.
struct FockVector {
  FockBasis basis;
  Vector amps;

  FockVector(FockBasis b, Vector a);
  double norm() const { return amps.norm(); }
  FockVector normalized() const;
};

enum class PotentialShape { Gaussian, TopHat, SechSquared };

PotentialShape potential_shape_from_name(const std::string& name);
std::string potential_shape_name(PotentialShape shape);

/// Transfer coefficients vhat_eps(q) = Vhat(eps * q) of the regularized
/// pair potential V_eps = eps^{-1} V(./eps), tabulated on the window's
/// momentum-transfer lattice q = 2*pi*d/L, |d| <= K-1. Real, even, and
/// vhat_eps(0) = 1 (unit-integral normalization).
class TwoBodyKernel {
 public:
  TwoBodyKernel(PotentialShape shape, double eps, const ModeBasis& modes);

  PotentialShape shape() const { return shape_; }
  double eps() const { return eps_; }
  const ModeBasis& modes() const { return modes_; }
  /// Coefficient for integer transfer d (mode-index difference).
  double vhat(int d) const;

 private:
  PotentialShape shape_;
  double eps_;
  ModeBasis modes_;
  std::vector<double> coeffs_;  // index d + (K-1)
};

/// Closed-form unit-integral Fourier transform Vhat(q) per shape.
double potential_vhat(PotentialShape shape, double q);

TwoBodyKernel potential_coefficients(PotentialShape shape, double eps, const ModeBasis& modes);

/// Second-quantized H = sum_p k_p^2 n_p
///   + kappa/(2 N L) sum_{p,q,d} vhat(d) adag_{p+d} adag_{q-d} a_q a_p,
/// all mode indices kept inside the window (projected Hamiltonian).
/// kappa = 0 drops the interaction.
SparseHermitian build_hamiltonian(const FockBasis& basis, const TwoBodyKernel& kernel, int kappa);

/// Kinetic-only Hamiltonian (interaction disabled).
SparseHermitian build_kinetic(const FockBasis& basis);

/// phi^{(x) N} in occupation amplitudes: coefficient on (n_1..n_K) is
/// sqrt(N!/prod n_p!) prod c_p^{n_p} with c the windowed, renormalized
/// coefficients of phi. Unit norm by construction.
FockVector product_state(const SpectralField& phi, const FockBasis& basis);

/// N_phi = adag(phi) a(phi) = sum_{pq} c_p conj(c_q) adag_p a_q as a
/// sparse matrix; spectrum contained in {0, ..., N}.
SparseHermitian number_operator(const SpectralField& phi, const FockBasis& basis);

/// dGamma(A) = sum_{pq} A_{pq} adag_p a_q for a one-body window matrix A.
SparseHermitian second_quantize_one_body(const Matrix& one_body, const FockBasis& basis);

/// Applies dGamma(A) without assembling it.
Vector apply_one_body(const Matrix& one_body, const FockBasis& basis, const Vector& v);

/// Total momentum operator sum_p n_p * (mode integer p) (diagonal).
SparseHermitian total_momentum(const FockBasis& basis);

/// Binary snapshot: header (N, K, L, ordering tag) then little-endian
/// f64 (re, im) pairs in basis order.
void save_fock_vector(std::ostream& out, const FockVector& v);
FockVector load_fock_vector(std::istream& in, const TorusGrid& grid, long long dim_cap =
                                FockBasis::kDefaultDimensionCap);

}  // namespace ll
