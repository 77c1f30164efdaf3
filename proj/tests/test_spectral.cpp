#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ll/spectral.hpp"

using namespace ll;

namespace {
constexpr double kPi = std::numbers::pi;

SpectralField single_mode(const TorusGrid& grid, int n, cplx coeff = 1.0) {
  cvec modes(grid.points(), cplx(0.0));
  modes[grid.index_of_mode(n)] = coeff;
  return SpectralField::from_modes(grid, modes);
}
}  // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("make_grid wavenumbers and spacing") {
  const TorusGrid g = make_grid(2.0 * kPi, 8);
  // k_n = n when L = 2 pi
  std::vector<int> ns;
  for (int i = 0; i < 8; ++i) ns.push_back(g.mode_of_index(i));
  CHECK(*std::min_element(ns.begin(), ns.end()) == -4);
  CHECK(*std::max_element(ns.begin(), ns.end()) == 3);
  for (int i = 0; i < 8; ++i) CHECK(g.wavenumber(i) == doctest::Approx(ns[i]).epsilon(1e-15));

  const TorusGrid g2 = make_grid(1.0, 8);
  CHECK(g2.spacing() == doctest::Approx(1.0 / 8));

  const TorusGrid g3 = make_grid(40.0, 512);
  CHECK(g3.points() == 512);
  CHECK(g3.nyquist() == doctest::Approx(2.0 * kPi * 256.0 / 40.0).epsilon(1e-15));
}

TEST_CASE("make_grid rejects bad arguments") {
  CHECK_THROWS_AS(make_grid(-1.0, 16), ConfigError);
  CHECK_THROWS_AS(make_grid(0.0, 16), ConfigError);
  CHECK_THROWS_AS(make_grid(1.0, 7), ConfigError);
  CHECK_THROWS_AS(make_grid(1.0, 4), ConfigError);
  CHECK_THROWS_AS(make_grid(1.0, 12), ConfigError);  // not a power of two
}

TEST_CASE("transform round-trip and Plancherel") {
  const TorusGrid g = make_grid(5.0, 64);
  Rng rng(11);
  cvec vals(64);
  for (auto& v : vals) v = rng.cnormal();
  const SpectralField f(g, vals);

  const SpectralField back = SpectralField::from_modes(g, f.to_modes());
  double worst = 0.0, scale = 0.0;
  for (int j = 0; j < 64; ++j) {
    worst = std::max(worst, std::abs(back.values[j] - f.values[j]));
    scale = std::max(scale, std::abs(f.values[j]));
  }
  CHECK(worst <= 1e-12 * scale);

  // mass equals the coefficient sum of squares
  const cvec c = f.to_modes();
  double csum = 0.0;
  for (const cplx& x : c) csum += std::norm(x);
  CHECK(f.mass() == doctest::Approx(csum).epsilon(1e-12));
  CHECK(sobolev_norm(f, 0.0) == doctest::Approx(std::sqrt(f.mass())).epsilon(1e-12));
}

TEST_CASE("lp_project selects frequencies sharply") {
  const TorusGrid g = make_grid(2.0 * kPi, 32);
  // e^{i k_3 x} + e^{i k_7 x}, cutoff between |k_3| and |k_7|
  cvec modes(32, cplx(0.0));
  modes[g.index_of_mode(3)] = 1.0;
  modes[g.index_of_mode(7)] = 1.0;
  const SpectralField f = SpectralField::from_modes(g, modes);

  const SpectralField low = lp_project(f, 5.0);
  const cvec lc = low.to_modes();
  CHECK(std::abs(lc[g.index_of_mode(3)] - 1.0) <= 1e-12);
  CHECK(std::abs(lc[g.index_of_mode(7)]) <= 1e-14);
  CHECK(lp_tail_norm(f, 5.0) == doctest::Approx(1.0).epsilon(1e-12));

  // cutoff >= Nyquist is the identity
  const SpectralField all = lp_project(f, g.nyquist() + 1.0);
  for (int j = 0; j < 32; ++j) CHECK(std::abs(all.values[j] - f.values[j]) <= 1e-13);

  // cutoff = 0 keeps only the spatial mean
  const SpectralField dc = lp_project(f, 0.0);
  const cvec dcm = dc.to_modes();
  for (int i = 0; i < 32; ++i) {
    if (g.mode_of_index(i) != 0) CHECK(std::abs(dcm[i]) <= 1e-14);
  }
}

TEST_CASE("lp_project is idempotent and self-adjoint") {
  const TorusGrid g = make_grid(3.0, 64);
  Rng rng(3);
  cvec a(64), b(64);
  for (auto& v : a) v = rng.cnormal();
  for (auto& v : b) v = rng.cnormal();
  const SpectralField fa(g, a), fb(g, b);
  const double cutoff = 20.0;

  const SpectralField once = lp_project(fa, cutoff);
  const SpectralField twice = lp_project(once, cutoff);
  for (int j = 0; j < 64; ++j) CHECK(std::abs(twice.values[j] - once.values[j]) <= 1e-12);

  const cplx lhs = inner(lp_project(fa, cutoff), fb);
  const cplx rhs = inner(fa, lp_project(fb, cutoff));
  CHECK(std::abs(lhs - rhs) <= 1e-12);
}

TEST_CASE("sobolev_norm closed forms") {
  const TorusGrid g = make_grid(2.0 * kPi, 64);
  // single mode e^{i k x}/sqrt(L): H^s norm is (1+k^2)^{s/2}
  const SpectralField f = single_mode(g, 3);
  CHECK(f.mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    CHECK(sobolev_norm(f, s) == doctest::Approx(std::pow(1.0 + 9.0, s / 2)).epsilon(1e-12));
  }

  // monotone in s for fixed field
  Rng rng(5);
  cvec vals(64);
  for (auto& v : vals) v = rng.cnormal();
  const SpectralField r(g, vals);
  CHECK(sobolev_norm(r, 0.0) <= sobolev_norm(r, 0.5));
  CHECK(sobolev_norm(r, 0.5) <= sobolev_norm(r, 1.5));
}

TEST_CASE("sobolev_norm of sech matches the analytic H1 norm") {
  // sqrt(2) sech(x) on a large box: mass = 4, ||phi'||^2 = 4/3
  const TorusGrid g = make_grid(40.0, 512);
  cvec vals(512);
  for (int j = 0; j < 512; ++j) {
    const double x = g.node(j) - 20.0;
    vals[j] = std::sqrt(2.0) / std::cosh(x);
  }
  const SpectralField f(g, vals);
  const double h1 = std::sqrt(4.0 + 4.0 / 3.0);
  CHECK(sobolev_norm(f, 1.0) == doctest::Approx(h1).epsilon(1e-6));
}

TEST_CASE("hoelder seminorm basic values") {
  const TorusGrid g = make_grid(4.0, 16);
  SpectralField constant(g, cvec(16, cplx(2.5, -1.0)));
  CHECK(hoelder_half_seminorm(constant) == doctest::Approx(0.0));

  // single step of height h between adjacent nodes
  cvec vals(16, cplx(0.0));
  for (int j = 8; j < 16; ++j) vals[j] = 3.0;
  const SpectralField step(g, vals);
  CHECK(hoelder_half_seminorm(step) == doctest::Approx(3.0 / std::sqrt(g.spacing())));
}

TEST_CASE("hoelder seminorm bounded by the gradient norm on band-limited fields") {
  const TorusGrid g = make_grid(4.0 * kPi, 64);
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    cvec modes(64, cplx(0.0));
    for (int i = 0; i < 64; ++i) {
      if (std::abs(g.mode_of_index(i)) < 24) modes[i] = rng.cnormal();  // top 25% empty
    }
    const SpectralField f = SpectralField::from_modes(g, modes);
    const cvec c = f.to_modes();
    double grad2 = 0.0;
    for (int i = 0; i < 64; ++i) grad2 += std::pow(g.wavenumber(i), 2) * std::norm(c[i]);
    CHECK(hoelder_half_seminorm(f) <= 1.05 * std::sqrt(grad2));
  }
}

TEST_SUITE_END();
