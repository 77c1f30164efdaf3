#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ll/oracle.hpp"

using namespace ll;
using oracle::TensorState;

namespace {
constexpr double kPi = std::numbers::pi;

struct Setup {
  TorusGrid grid;
  ModeBasis modes;
  Setup(int k) : grid(2.0 * kPi, 32), modes(grid, k) {}
};

TensorState product_tensor(const ModeBasis& modes, const Vector& c, int n) {
  const int k = modes.size();
  long long dim = 1;
  for (int i = 0; i < n; ++i) dim *= k;
  Vector amps(dim);
  for (long long idx = 0; idx < dim; ++idx) {
    long long rest = idx;
    cplx prod = 1.0;
    for (int slot = n - 1; slot >= 0; --slot) {
      prod *= c(rest % k);
      rest /= k;
    }
    amps(idx) = prod;
  }
  return TensorState(n, modes, std::move(amps));
}

Vector random_unit(int k, Rng& rng) {
  Vector c(k);
  for (int i = 0; i < k; ++i) c(i) = rng.cnormal();
  return c / c.norm();
}
}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("symmetrize projects onto the bosonic subspace") {
  Setup s(2);
  Rng rng(41);

  SUBCASE("already symmetric input is unchanged") {
    const TensorState sym = oracle::random_symmetric_state(2, s.modes, rng);
    const TensorState again = oracle::symmetrize(sym);
    CHECK((again.amps - sym.amps).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("e0 x e1 symmetrizes to the balanced pair before renormalization") {
    Vector amps = Vector::Zero(4);
    amps(1) = 1.0;  // e_0 (x) e_1
    const TensorState psi(2, s.modes, amps);
    const TensorState sym = oracle::symmetrize(psi);
    CHECK(std::abs(sym.amps(1) - 0.5) <= 1e-15);
    CHECK(std::abs(sym.amps(2) - 0.5) <= 1e-15);
    CHECK(std::abs(sym.amps(0)) <= 1e-15);
    CHECK(std::abs(sym.amps(3)) <= 1e-15);
  }

  SUBCASE("antisymmetric input is annihilated") {
    Vector amps = Vector::Zero(4);
    amps(1) = 1.0;
    amps(2) = -1.0;
    const TensorState sym = oracle::symmetrize(TensorState(2, s.modes, amps));
    CHECK(sym.amps.cwiseAbs().maxCoeff() <= 1e-15);
  }

  SUBCASE("projection property") {
    Vector amps(4);
    Rng r2(5);
    for (int i = 0; i < 4; ++i) amps(i) = r2.cnormal();
    const TensorState once = oracle::symmetrize(TensorState(2, s.modes, amps));
    const TensorState twice = oracle::symmetrize(once);
    CHECK((twice.amps - once.amps).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("combinatorial projectors on product states") {
  Setup s(4);
  Rng rng(43);
  const Vector c = random_unit(4, rng);
  const SpectralField phi = s.modes.unwindow(c);
  const int n = 3;
  const TensorState prod = product_tensor(s.modes, c, n);

  // P_0 phi^{(x)N} = phi^{(x)N}
  const TensorState p0 = oracle::apply_Pk(prod, phi, 0);
  CHECK((p0.amps - prod.amps).cwiseAbs().maxCoeff() <= 1e-12);

  // orthogonal product state sits entirely in P_N
  Vector d = random_unit(4, rng);
  d -= c * c.dot(d);
  d /= d.norm();
  const TensorState orth = product_tensor(s.modes, d, n);
  const TensorState pn = oracle::apply_Pk(orth, phi, n);
  CHECK((pn.amps - orth.amps).cwiseAbs().maxCoeff() <= 1e-12);

  // completeness on a random state
  const TensorState psi = oracle::random_symmetric_state(n, s.modes, rng);
  Vector sum = Vector::Zero(psi.dim());
  for (int k = 0; k <= n; ++k) sum += oracle::apply_Pk(psi, phi, k).amps;
  CHECK((sum - psi.amps).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("occupation isometry round-trips") {
  Setup s(2);
  Rng rng(47);

  SUBCASE("product state maps to product amplitudes") {
    const Vector c = random_unit(2, rng);
    const int n = 3;
    TensorState prod = product_tensor(s.modes, c, n);
    prod.amps /= prod.norm();
    const FockBasis basis = enumerate_basis(n, s.modes);
    const FockVector direct = product_state(s.modes.unwindow(c), basis);
    const FockVector via = oracle::firstq_to_fock(prod, basis);
    CHECK((direct.amps - via.amps).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("occupation (1,1) is the normalized symmetric pair") {
    const FockBasis basis = enumerate_basis(2, s.modes);
    Vector e = Vector::Zero(3);
    e(basis.index_of({1, 1})) = 1.0;
    const TensorState t = oracle::fock_to_firstq(FockVector(basis, e));
    const double r2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(t.amps(1) - r2) <= 1e-14);
    CHECK(std::abs(t.amps(2) - r2) <= 1e-14);
  }

  SUBCASE("random symmetric states round-trip with preserved norm") {
    const FockBasis basis = enumerate_basis(3, s.modes);
    for (int trial = 0; trial < 10; ++trial) {
      const TensorState psi = oracle::random_symmetric_state(3, s.modes, rng);
      const FockVector v = oracle::firstq_to_fock(psi, basis);
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
      const TensorState back = oracle::fock_to_firstq(v);
      CHECK((back.amps - psi.amps).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("non-symmetric input is rejected with the asymmetry magnitude") {
    Vector amps = Vector::Zero(4);
    amps(1) = 1.0;  // e0 x e1, not symmetric
    const FockBasis basis = enumerate_basis(2, s.modes);
    try {
      oracle::firstq_to_fock(TensorState(2, s.modes, amps), basis);
      FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("asymmetry") != std::string::npos);
    }
  }
}

TEST_CASE("brute Hamiltonian special cases") {
  Setup s(2);
  const TwoBodyKernel kernel = potential_coefficients(PotentialShape::Gaussian, 0.5, s.modes);

  SUBCASE("N=1 is the kinetic diagonal") {
    const Matrix h = oracle::brute_hamiltonian(1, s.modes, kernel, +1);
    for (int p = 0; p < 2; ++p) {
      const double k = s.modes.wavenumber(p);
      CHECK(h(p, p).real() == doctest::Approx(k * k).epsilon(1e-14));
    }
  }

  SUBCASE("kappa = 0 gives sums of kinetic energies") {
    const Matrix h = oracle::brute_hamiltonian(2, s.modes, kernel, 0);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const double ka = s.modes.wavenumber(a), kb = s.modes.wavenumber(b);
        CHECK(h(a * 2 + b, a * 2 + b).real() ==
              doctest::Approx(ka * ka + kb * kb).epsilon(1e-14));
      }
    }
  }

  SUBCASE("size guard") {
    Setup wide(6);
    const TwoBodyKernel k6 = potential_coefficients(PotentialShape::Gaussian, 0.5, wide.modes);
    CHECK_THROWS_AS(oracle::brute_hamiltonian(6, wide.modes, k6, +1), std::invalid_argument);
  }
}

TEST_CASE("oracle rdm1 of a product tensor is the mode projector") {
  Setup s(4);
  Rng rng(53);
  const Vector c = random_unit(4, rng);
  TensorState prod = product_tensor(s.modes, c, 3);
  prod.amps /= prod.norm();
  const Matrix g = oracle::rdm1(prod);
  const Matrix expect = c * c.adjoint();
  CHECK((g - expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_SUITE_END();
