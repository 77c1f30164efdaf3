#pragma once

#include <memory>

#include "ll/common.hpp"

namespace ll {

namespace detail {
class FftEngine;  // FFTW plan pair for one grid size
}

/// Uniform periodic grid on [0, L) with M nodes and the plane-wave
/// frequency lattice k_n = 2*pi*n/L, n in {-M/2, ..., M/2-1}.
///
/// Immutable and cheap to copy; the FFT plans are shared. M must be a
/// power of two (>= 8) so transforms and mode bookkeeping stay exact.
class TorusGrid {
 public:
  TorusGrid(double length, int points);

  double length() const { return length_; }
  int points() const { return points_; }
  double spacing() const { return length_ / points_; }
  double node(int j) const { return spacing() * j; }

  /// Signed mode integer n for storage index i in FFT layout.
  int mode_of_index(int i) const { return i < points_ / 2 ? i : i - points_; }
  /// Storage index for a signed mode integer.
  int index_of_mode(int n) const { return n >= 0 ? n : n + points_; }
  /// k_n for storage index i.
  double wavenumber(int i) const;
  double nyquist() const;

  /// Torus distance between nodes i and j.
  double torus_distance(int i, int j) const;

  /// Unscaled DFT, e^{-i k x} kernel (forward) / e^{+i k x} (inverse).
  void dft_forward(const cvec& in, cvec& out) const;
  void dft_inverse(const cvec& in, cvec& out) const;

  bool same_as(const TorusGrid& other) const {
    return points_ == other.points_ && length_ == other.length_;
  }

 private:
  double length_;
  int points_;
  std::shared_ptr<detail::FftEngine> fft_;
};

TorusGrid make_grid(double length, int points);

/// One-particle complex wavefunction sampled on grid nodes. Amplitudes
/// carry dimension 1/sqrt(length) so that the quadrature mass
/// sum |phi_j|^2 (L/M) is dimensionless.
struct SpectralField {
  TorusGrid grid;
  cvec values;

  SpectralField(TorusGrid g, cvec v);

  /// Quadrature mass integral |phi|^2.
  double mass() const;

  /// Unitary frequency coefficients c_n (FFT index layout):
  /// phi(x) = sum_n c_n e^{i k_n x}/sqrt(L), with sum |c_n|^2 = mass.
  cvec to_modes() const;
  static SpectralField from_modes(const TorusGrid& grid, const cvec& modes);

  SpectralField normalized() const;
};

/// Discrete L^2 inner product <f, g> = (L/M) sum conj(f_j) g_j
/// (physicist convention, linear in the second slot).
cplx inner(const SpectralField& f, const SpectralField& g);

/// Sharp frequency cutoff: zero every mode with |k_n| > cutoff, keep
/// modes with |k_n| <= cutoff unchanged. Exactly idempotent.
SpectralField lp_project(const SpectralField& phi, double cutoff);

/// Complementary projector mass: || (1 - P_{<=cutoff}) phi ||_{L^2}.
double lp_tail_norm(const SpectralField& phi, double cutoff);

/// sqrt( sum (1 + k_n^2)^s |c_n|^2 ). Equals the L^2 norm at s = 0.
double sobolev_norm(const SpectralField& phi, double s);

/// Discrete sup-norm max_j |phi_j|.
double sup_norm(const SpectralField& phi);

/// L^q quadrature norm ((L/M) sum |phi_j|^q)^{1/q}; q may be +infinity.
double lq_norm(const SpectralField& phi, double q);

/// max over node pairs of |phi(x) - phi(y)| / d(x,y)^{1/2} with the
/// torus distance d. Zero on constants.
double hoelder_half_seminorm(const SpectralField& phi);

}  // namespace ll
