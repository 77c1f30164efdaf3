#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "ll/fock.hpp"
#include "ll/oracle.hpp"

using namespace ll;

namespace {
constexpr double kPi = std::numbers::pi;

struct Setup {
  TorusGrid grid;
  ModeBasis modes;
  Setup(int k, double length = 2.0 * kPi, int points = 32)
      : grid(length, points), modes(grid, k) {}
};

SpectralField window_field(const ModeBasis& modes, const Vector& coeffs) {
  return modes.unwindow(coeffs);
}
}  // namespace

TEST_SUITE_BEGIN("fock");

TEST_CASE("mode basis is orthonormal under the grid quadrature") {
  Setup s(6);
  for (int p = 0; p < 6; ++p) {
    for (int q = 0; q < 6; ++q) {
      const cplx ip = inner(s.modes.mode_field(p), s.modes.mode_field(q));
      CHECK(std::abs(ip - (p == q ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("basis enumeration dimension and order") {
  Setup s2(2);
  const FockBasis b2 = enumerate_basis(2, s2.modes);
  REQUIRE(b2.dim() == 3);
  CHECK(b2.occupation(0) == std::vector<int>{2, 0});
  CHECK(b2.occupation(1) == std::vector<int>{1, 1});
  CHECK(b2.occupation(2) == std::vector<int>{0, 2});

  Setup s4(4);
  CHECK(enumerate_basis(3, s4.modes).dim() == 20);  // binomial(6, 3)

  CHECK(fock_dimension(8, 10) == 24310);  // binomial(17, 9)

  // index_of inverts the enumeration
  const FockBasis b3 = enumerate_basis(3, s4.modes);
  for (long long i = 0; i < b3.dim(); ++i) CHECK(b3.index_of(b3.occupation(i)) == i);
}

TEST_CASE("dimension cap is enforced with the computed dimension") {
  Setup s(6, 2.0 * kPi, 64);
  try {
    enumerate_basis(12, ModeBasis(s.grid, 32), 1000);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("exceeds the cap") != std::string::npos);
  }
}

TEST_CASE("potential coefficients: closed forms and invariants") {
  Setup s(8);
  for (auto shape : {PotentialShape::Gaussian, PotentialShape::TopHat, PotentialShape::SechSquared}) {
    const TwoBodyKernel k = potential_coefficients(shape, 0.5, s.modes);
    CHECK(k.vhat(0) == doctest::Approx(1.0).epsilon(1e-10));  // unit integral
    for (int d = 1; d <= 7; ++d) CHECK(k.vhat(d) == doctest::Approx(k.vhat(-d)).epsilon(1e-14));
  }

  // gaussian: vhat = exp(-(eps q)^2 / 2)
  const TwoBodyKernel g = potential_coefficients(PotentialShape::Gaussian, 0.5, s.modes);
  for (int d = -7; d <= 7; ++d) {
    CHECK(g.vhat(d) == doctest::Approx(std::exp(-0.125 * d * d)).epsilon(1e-12));
  }

  // delta limit: coefficients approach 1 as eps decreases
  const TwoBodyKernel tighter = potential_coefficients(PotentialShape::Gaussian, 0.4, s.modes);
  CHECK(tighter.vhat(5) > g.vhat(5));

  // monotone decay in eps at fixed transfer
  double prev = 1.0;
  for (double eps : {0.5, 1.0, 2.0}) {
    const TwoBodyKernel k = potential_coefficients(PotentialShape::Gaussian, eps, s.modes);
    CHECK(k.vhat(3) < prev);
    prev = k.vhat(3);
  }

  // resolvability guard: eps below two grid spacings
  CHECK_THROWS_AS(potential_coefficients(PotentialShape::Gaussian, 0.1, s.modes), ConfigError);
}

TEST_CASE("N=1 Hamiltonian is the pure kinetic diagonal") {
  Setup s(4);
  const FockBasis b = enumerate_basis(1, s.modes);
  const TwoBodyKernel k = potential_coefficients(PotentialShape::Gaussian, 0.5, s.modes);
  const SparseHermitian h = build_hamiltonian(b, k, +1);
  const Matrix dense = Matrix(h);
  for (long long i = 0; i < b.dim(); ++i) {
    for (long long j = 0; j < b.dim(); ++j) {
      if (i == j) {
        int mode = -1;
        for (int p = 0; p < 4; ++p) {
          if (b.occupation(i)[p] == 1) mode = p;
        }
        const double kk = s.modes.wavenumber(mode);
        CHECK(dense(i, i).real() == doctest::Approx(kk * kk).epsilon(1e-14));
      } else {
        CHECK(std::abs(dense(i, j)) == 0.0);
      }
    }
  }
}

TEST_CASE("N=2 K=2 Hamiltonian matches the hand computation") {
  // window modes {-1, 0}; momentum conservation makes the 3x3 diagonal,
  // with the exchange coefficient kappa/(2NL) vhat(k1-k0) appearing on
  // the (1,1) occupation
  Setup s(2);
  const double l = s.grid.length();
  const FockBasis b = enumerate_basis(2, s.modes);
  const TwoBodyKernel k = potential_coefficients(PotentialShape::Gaussian, 0.5, s.modes);
  const SparseHermitian h = build_hamiltonian(b, k, +1);
  const Matrix dense = Matrix(h);

  const double ka = s.modes.wavenumber(0);  // mode -1
  const double c0 = 1.0 / (2.0 * 2.0 * l);  // kappa/(2NL), kappa = +1
  const double v1 = k.vhat(1);

  CHECK(dense(0, 0).real() == doctest::Approx(2.0 * ka * ka + 2.0 * c0).epsilon(1e-13));
  CHECK(dense(1, 1).real() == doctest::Approx(ka * ka + 2.0 * c0 * (1.0 + v1)).epsilon(1e-13));
  CHECK(dense(2, 2).real() == doctest::Approx(2.0 * c0).epsilon(1e-13));
  for (long long i = 0; i < 3; ++i) {
    for (long long j = 0; j < 3; ++j) {
      if (i != j) CHECK(std::abs(dense(i, j)) <= 1e-15);
    }
  }

  // hermiticity is exact by construction
  CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("second-quantized spectra match the first-quantized oracle") {
  Setup s(4);
  const TwoBodyKernel k = potential_coefficients(PotentialShape::Gaussian, 0.5, s.modes);
  for (int n : {2, 3}) {
    for (int kappa : {+1, -1, 0}) {
      const FockBasis b = enumerate_basis(n, s.modes);
      const Matrix hf = Matrix(build_hamiltonian(b, k, kappa));
      const Matrix hb = oracle::brute_hamiltonian(n, s.modes, k, kappa);

      // restrict the brute Hamiltonian to the symmetric subspace via the
      // occupation isometry and compare spectra
      Matrix iso(hb.rows(), b.dim());
      for (long long col = 0; col < b.dim(); ++col) {
        Vector e = Vector::Zero(b.dim());
        e(col) = 1.0;
        iso.col(col) = oracle::fock_to_firstq(FockVector(b, e)).amps;
      }
      const Matrix hb_sym = iso.adjoint() * hb * iso;

      Eigen::SelfAdjointEigenSolver<Matrix> ef(hf, Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Matrix> eb(hb_sym, Eigen::EigenvaluesOnly);
      CHECK((ef.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("Hamiltonian commutes with the total momentum") {
  Setup s(6);
  const FockBasis b = enumerate_basis(3, s.modes);
  const TwoBodyKernel k = potential_coefficients(PotentialShape::SechSquared, 0.7, s.modes);
  const SparseHermitian h = build_hamiltonian(b, k, -1);
  const SparseHermitian p = total_momentum(b);

  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    Vector v(b.dim());
    for (long long i = 0; i < b.dim(); ++i) v(i) = rng.cnormal();
    v /= v.norm();
    const Vector comm = h * (p * v) - p * (h * v);
    CHECK(comm.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("product state amplitudes") {
  Setup s(2);
  SUBCASE("N=1 amplitudes are the mode coefficients") {
    const FockBasis b = enumerate_basis(1, s.modes);
    Vector c(2);
    c << cplx(0.6, 0.0), cplx(0.0, 0.8);
    const FockVector v = product_state(window_field(s.modes, c), b);
    // basis order: (1,0), (0,1)
    CHECK(std::abs(v.amps(0) - c(0)) <= 1e-12);
    CHECK(std::abs(v.amps(1) - c(1)) <= 1e-12);
  }

  SUBCASE("single mode puts all particles in one slot") {
    const FockBasis b = enumerate_basis(4, s.modes);
    Vector c(2);
    c << 1.0, 0.0;
    const FockVector v = product_state(window_field(s.modes, c), b);
    CHECK(std::abs(v.amps(b.index_of({4, 0})) - 1.0) <= 1e-12);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("two-mode equal superposition at N=3 carries binomial weights") {
    const FockBasis b = enumerate_basis(3, s.modes);
    Vector c(2);
    c << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const FockVector v = product_state(window_field(s.modes, c), b);
    const double r8 = 1.0 / std::sqrt(8.0);
    CHECK(std::abs(v.amps(b.index_of({3, 0})) - r8) <= 1e-12);
    CHECK(std::abs(v.amps(b.index_of({2, 1})) - std::sqrt(3.0) * r8) <= 1e-12);
    CHECK(std::abs(v.amps(b.index_of({1, 2})) - std::sqrt(3.0) * r8) <= 1e-12);
    CHECK(std::abs(v.amps(b.index_of({0, 3})) - r8) <= 1e-12);
  }

  SUBCASE("zero windowed mass is rejected") {
    Setup wide(4, 2.0 * kPi, 32);
    cvec modes(32, cplx(0.0));
    modes[wide.grid.index_of_mode(9)] = 1.0;  // outside the window
    const SpectralField phi = SpectralField::from_modes(wide.grid, modes);
    const FockBasis b = enumerate_basis(2, wide.modes);
    CHECK_THROWS_AS(product_state(phi, b), NumericError);
  }
}

TEST_CASE("number operator for a mode state is the occupation diagonal") {
  Setup s(4);
  const FockBasis b = enumerate_basis(3, s.modes);
  const SpectralField e0 = s.modes.mode_field(0);
  const SparseHermitian nass = number_operator(e0, b);
  const Matrix dense = Matrix(nass);
  for (long long i = 0; i < b.dim(); ++i) {
    for (long long j = 0; j < b.dim(); ++j) {
      const double expect = (i == j) ? double(b.occupation(i)[0]) : 0.0;
      CHECK(std::abs(dense(i, j) - expect) <= 1e-12);
    }
  }
}

TEST_CASE("number operator expectations on product states") {
  Setup s(4);
  const FockBasis b = enumerate_basis(3, s.modes);
  Vector c(4);
  c << cplx(0.5, 0.1), cplx(0.2, -0.4), cplx(0.3, 0.3), cplx(0.1, 0.0);
  c /= c.norm();
  const SpectralField phi = window_field(s.modes, c);
  const FockVector v = product_state(phi, b);
  const SparseHermitian nphi = number_operator(phi, b);
  CHECK(std::real(v.amps.dot(nphi * v.amps)) == doctest::Approx(3.0).epsilon(1e-12));

  // orthogonal state: expectation zero
  Vector d(4);
  d << -std::conj(c(1)), std::conj(c(0)), 0.0, 0.0;
  d /= d.norm();
  const FockVector w = product_state(window_field(s.modes, d), b);
  CHECK(std::abs(w.amps.dot(nphi * w.amps)) <= 1e-12);
}

TEST_CASE("snapshot file round-trips bit-exactly") {
  Setup s(4);
  const FockBasis b = enumerate_basis(3, s.modes);
  Rng rng(31);
  Vector a(b.dim());
  for (long long i = 0; i < b.dim(); ++i) a(i) = rng.cnormal();
  const FockVector v(b, a);

  std::stringstream buf;
  save_fock_vector(buf, v);
  const FockVector back = load_fock_vector(buf, s.grid);
  REQUIRE(back.basis.dim() == v.basis.dim());
  CHECK(back.basis.particles() == 3);
  for (long long i = 0; i < b.dim(); ++i) {
    CHECK(back.amps(i).real() == v.amps(i).real());
    CHECK(back.amps(i).imag() == v.amps(i).imag());
  }
}

TEST_SUITE_END();
