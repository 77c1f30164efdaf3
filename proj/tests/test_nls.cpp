#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "ll/nls.hpp"

using namespace ll;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

SpectralField plane_wave(const TorusGrid& grid, int n) {
  cvec modes(grid.points(), cplx(0.0));
  modes[grid.index_of_mode(n)] = 1.0;  // unit mass: |A|^2 L = 1
  return SpectralField::from_modes(grid, modes);
}

SpectralField bright_soliton(const TorusGrid& grid, double center) {
  cvec vals(grid.points());
  for (int j = 0; j < grid.points(); ++j) {
    vals[j] = std::sqrt(2.0) / std::cosh(grid.node(j) - center);
  }
  return SpectralField(grid, vals);
}

double l2_distance(const SpectralField& a, const SpectralField& b) {
  cvec d = a.values;
  for (std::size_t j = 0; j < d.size(); ++j) d[j] -= b.values[j];
  return std::sqrt(SpectralField(a.grid, std::move(d)).mass());
}
}  // namespace

TEST_SUITE_BEGIN("nls");

TEST_CASE("plane wave evolves with the exact nonlinear dispersion relation") {
  const TorusGrid g = make_grid(2.0 * kPi, 64);
  const int n = 2;
  const SpectralField phi0 = plane_wave(g, n);
  const double a2 = 1.0 / g.length();  // |A|^2

  for (int kappa : {+1, -1}) {
    const NlsTrajectory traj = nls_evolve(phi0, kappa, 1.0, 1e-3, 1000);
    const cvec c = traj.fields.back().to_modes();
    const cplx coeff = c[g.index_of_mode(n)];
    // A e^{i(kx - (k^2 + kappa |A|^2) t)}
    const double expected_phase = -(double(n * n) + kappa * a2) * 1.0;
    const cplx expected = std::polar(1.0, expected_phase);
    CHECK(std::abs(coeff - expected) <= 1e-9);
  }
}

TEST_CASE("focusing soliton is stationary up to phase") {
  const TorusGrid g = make_grid(40.0, 512);
  const SpectralField phi0 = bright_soliton(g, 20.0);
  const NlsTrajectory traj = nls_evolve(phi0, -1, 1.0, 1e-3, 1000);
  REQUIRE(traj.size() == 2);

  // exact solution sqrt(2) sech(x) e^{i t}
  cvec exact = phi0.values;
  for (cplx& v : exact) v *= std::polar(1.0, 1.0);
  CHECK(l2_distance(traj.fields.back(), SpectralField(g, exact)) <= 1e-4);

  // conservation at reference resolution
  const double m0 = phi0.mass();
  const double e0 = nls_energy(phi0, -1);
  CHECK(std::abs(traj.fields.back().mass() - m0) / m0 <= 1e-8);
  CHECK(std::abs(nls_energy(traj.fields.back(), -1) - e0) / std::abs(e0) <= 1e-6);
}

TEST_CASE("t_final = 0 returns the datum only") {
  const TorusGrid g = make_grid(2.0 * kPi, 16);
  const SpectralField phi0 = plane_wave(g, 1);
  const NlsTrajectory traj = nls_evolve(phi0, +1, 0.0, 1e-2, 1);
  REQUIRE(traj.size() == 1);
  CHECK(traj.times[0] == 0.0);
  CHECK(l2_distance(traj.fields[0], phi0) == 0.0);
}

TEST_CASE("conjugate evolution reverses the flow") {
  const TorusGrid g = make_grid(40.0, 256);
  const SpectralField phi0 = bright_soliton(g, 20.0);
  const NlsTrajectory fwd = nls_evolve(phi0, -1, 1.0, 1e-3, 1000);
  cvec conj_vals = fwd.fields.back().values;
  for (cplx& v : conj_vals) v = std::conj(v);
  const NlsTrajectory back = nls_evolve(SpectralField(g, conj_vals), -1, 1.0, 1e-3, 1000);
  cvec recovered = back.fields.back().values;
  for (cplx& v : recovered) v = std::conj(v);
  CHECK(l2_distance(SpectralField(g, recovered), phi0) <= 1e-7);
}

TEST_CASE("splitting is second order") {
  const TorusGrid g = make_grid(40.0, 256);
  const SpectralField phi0 = bright_soliton(g, 20.0);
  const double t = 0.5;
  const SpectralField ref = nls_evolve(phi0, -1, t, 0.02 / 8, 1000000).fields.back();
  const double e1 = l2_distance(nls_evolve(phi0, -1, t, 0.02, 1000000).fields.back(), ref);
  const double e2 = l2_distance(nls_evolve(phi0, -1, t, 0.01, 1000000).fields.back(), ref);
  // with exact order 2 against a dt/8 reference the ratio is (1-1/64)/(1/4-1/64) = 4.2
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("divergence is reported as a numerical failure") {
  const TorusGrid g = make_grid(2.0 * kPi, 32);
  cvec vals(32, cplx(1e200, 0.0));  // overflows in the cubic phase
  const SpectralField phi0(g, vals);
  CHECK_THROWS_AS(nls_evolve(phi0, -1, 1.0, 1e-3, 10), NumericError);
}

TEST_CASE("stability guard rejects too-coarse steps") {
  const TorusGrid g = make_grid(2.0 * kPi, 512);
  const SpectralField phi0 = plane_wave(g, 1);
  NlsOptions opts;
  opts.stability_bound = 1.0;
  CHECK_THROWS_AS(nls_evolve(phi0, +1, 1.0, 1e-3, 10, opts), ConfigError);
}

TEST_CASE("nls_energy closed forms") {
  const TorusGrid g = make_grid(2.0 * kPi, 64);
  const double l = g.length();

  // plane wave |A|^2 L = 1: E = k^2 + kappa/(2L)
  for (int kappa : {+1, -1}) {
    const SpectralField f = plane_wave(g, 3);
    CHECK(nls_energy(f, kappa) == doctest::Approx(9.0 + kappa / (2.0 * l)).epsilon(1e-12));
  }

  // constant 1/sqrt(L): E = 1/(2L) for kappa = +1
  cvec vals(64, cplx(1.0 / std::sqrt(l), 0.0));
  CHECK(nls_energy(SpectralField(g, vals), +1) == doctest::Approx(1.0 / (2.0 * l)).epsilon(1e-12));

  // zero field
  CHECK(nls_energy(SpectralField(g, cvec(64, cplx(0.0))), -1) == doctest::Approx(0.0));
}

TEST_CASE("strichartz norms on closed-form trajectories") {
  const TorusGrid g = make_grid(2.0 * kPi, 64);
  const SpectralField phi0 = plane_wave(g, 2);
  const NlsTrajectory traj = nls_evolve(phi0, +1, 1.0, 1e-2, 10);

  // (inf, 2) on a mass-1 trajectory
  CHECK(strichartz_norm(traj, kInf, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

  // plane wave, (8, 4): |A| L^{1/4} T^{1/8} with T the quadrature span
  const double amp = 1.0 / std::sqrt(g.length());
  const double t_quad = traj.sample_dt * traj.size();
  const double expected = amp * std::pow(g.length(), 0.25) * std::pow(t_quad, 0.125);
  CHECK(strichartz_norm(traj, 8.0, 4.0) == doctest::Approx(expected).epsilon(1e-10));

  // single-sample trajectory, (4, inf): dt^{1/4} sup|phi|
  NlsTrajectory single;
  single.kappa = +1;
  single.sample_dt = 0.25;
  single.times = {0.0};
  single.fields.push_back(phi0);
  CHECK(strichartz_norm(single, 4.0, kInf) ==
        doctest::Approx(std::pow(0.25, 0.25) * sup_norm(phi0)).epsilon(1e-12));

  CHECK_THROWS_AS(strichartz_norm(traj, 3.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(strichartz_norm(traj, 8.0, 5.0), std::invalid_argument);
}

TEST_CASE("strichartz growth is at most mildly superlinear in T") {
  const TorusGrid g = make_grid(2.0 * kPi, 64);
  // generic smooth unit-mass datum
  cvec modes(64, cplx(0.0));
  modes[g.index_of_mode(0)] = 0.8;
  modes[g.index_of_mode(1)] = 0.5;
  modes[g.index_of_mode(-2)] = std::sqrt(1.0 - 0.64 - 0.25);
  const SpectralField phi0 = SpectralField::from_modes(g, modes);

  std::vector<double> ts = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> norms;
  for (double t : ts) {
    const NlsTrajectory traj = nls_evolve(phi0, +1, t, 1e-2, 5);
    double s = 0.0;
    for (auto [p, q] : std::vector<std::pair<double, double>>{{kInf, 2.0}, {8.0, 4.0}, {6.0, 6.0}}) {
      s = std::max(s, strichartz_norm(traj, p, q));
    }
    norms.push_back(s);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double x = std::log(ts[i]), y = std::log(norms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = ts.size();
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope <= 1.1);
}

TEST_CASE("dependence_gap diagnostics") {
  const TorusGrid g = make_grid(2.0 * kPi, 64);
  cvec modes(64, cplx(0.0));
  modes[g.index_of_mode(0)] = 0.6;
  modes[g.index_of_mode(1)] = 0.8;
  const SpectralField phi0 = SpectralField::from_modes(g, modes);

  SUBCASE("identical data have zero gap") {
    const DependenceReport rep = dependence_gap(phi0, phi0, +1, 0.5, 1e-3, 50, 1.0);
    CHECK(rep.sup_l2_gap <= 1e-13);
    CHECK(rep.initial_gap <= 1e-13);
  }

  SUBCASE("global phase rotation keeps a constant gap") {
    const double theta = 0.7;
    cvec rotated = phi0.values;
    for (cplx& v : rotated) v *= std::polar(1.0, theta);
    const SpectralField psi0(g, rotated);
    const DependenceReport rep = dependence_gap(phi0, psi0, +1, 0.5, 1e-3, 50, 1.0);
    const double expected = std::abs(std::polar(1.0, theta) - 1.0);  // ||phi0|| = 1
    CHECK(rep.sup_l2_gap == doctest::Approx(expected).epsilon(1e-9));
    CHECK(rep.initial_gap == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rep.sup_l2_gap >= rep.initial_gap * std::exp(-1e-6));
  }

  SUBCASE("nearby data: log gap grows at most linearly") {
    cvec bumped = phi0.values;
    for (int j = 0; j < 64; ++j) bumped[j] += 1e-4 * std::polar(1.0, 0.1 * j);
    const SpectralField psi0(g, bumped);
    const DependenceReport rep = dependence_gap(phi0, psi0, +1, 2.0, 1e-3, 100, 1.0);
    CHECK(std::isfinite(rep.fitted_log_slope));
    CHECK(rep.fitted_log_slope <= 10.0);  // bounded exponential rate
    CHECK(rep.bound >= rep.initial_gap);
  }
}

TEST_CASE("mollify_initial_datum applies the log-power cutoff") {
  const TorusGrid g = make_grid(2.0 * kPi, 64);

  // N = 3, eta = 0.2: cutoff (log 3)^0.2 ~ 1.019 keeps only |k| <= 1
  CHECK(mollify_cutoff(3, 0.2) == doctest::Approx(1.01899).epsilon(1e-4));
  cvec modes(64, cplx(0.0));
  modes[g.index_of_mode(0)] = 0.5;
  modes[g.index_of_mode(1)] = 0.5;
  modes[g.index_of_mode(2)] = std::sqrt(0.5);
  const SpectralField phi0 = SpectralField::from_modes(g, modes);
  const SpectralField moll = mollify_initial_datum(phi0, 3, 0.2);
  const cvec c = moll.to_modes();
  CHECK(std::abs(c[g.index_of_mode(2)]) <= 1e-14);
  CHECK(moll.mass() == doctest::Approx(1.0).epsilon(1e-12));
  // tail mass: ||P_{>cutoff} phi0|| = sqrt(0.5)
  CHECK(lp_tail_norm(phi0, mollify_cutoff(3, 0.2)) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  // band-limited datum is unchanged
  cvec low(64, cplx(0.0));
  low[g.index_of_mode(0)] = 1.0;
  const SpectralField flat = SpectralField::from_modes(g, low);
  const SpectralField same = mollify_initial_datum(flat, 5, 0.2);
  CHECK(l2_distance(same, flat) <= 1e-13);

  // no low-frequency content is an error
  cvec high(64, cplx(0.0));
  high[g.index_of_mode(9)] = 1.0;
  CHECK_THROWS_AS(mollify_initial_datum(SpectralField::from_modes(g, high), 3, 0.2), NumericError);
}

TEST_SUITE_END();
