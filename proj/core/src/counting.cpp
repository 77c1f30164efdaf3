#include "ll/counting.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <sstream>
#include <utility>

namespace ll {

namespace {

constexpr int kMaxParticlesForCounting = 12;
constexpr double kNegativeWeightFloor = -1e-10;

void check_counting_inputs(const FockVector& phi_n) {
  if (phi_n.basis.particles() > kMaxParticlesForCounting) {
    std::ostringstream msg;
    msg << "counting: N = " << phi_n.basis.particles() << " exceeds the conditioning guard N <= "
        << kMaxParticlesForCounting;
    throw std::invalid_argument(msg.str());
  }
}

/// Bjoerck-Pereyra solve of the dual Vandermonde system
/// sum_j nodes_j^m w_j = mu_m over nodes 0..N.
std::vector<double> vandermonde_dual_solve(const std::vector<double>& mu) {
  const int n = static_cast<int>(mu.size()) - 1;
  std::vector<double> x = mu;
  for (int k = 0; k <= n - 1; ++k) {
    for (int i = n; i >= k + 1; --i) x[i] -= double(k) * x[i - 1];
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int i = k + 1; i <= n; ++i) x[i] /= double(i) - double(i - k - 1);
    for (int i = k; i <= n - 1; ++i) x[i] -= x[i + 1];
  }
  return x;
}

bool distribution_plausible(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) {
    // anything below the clamping floor routes to the fallback path
    if (!std::isfinite(v) || v < kNegativeWeightFloor) return false;
    s += v;
  }
  return std::abs(s - 1.0) <= 1e-8;
}

CountingDistribution finalize(std::vector<double> w, int n, std::string method) {
  CountingDistribution dist;
  dist.particles = n;
  dist.method = std::move(method);
  dist.clamped = 0;
  for (double& v : w) {
    if (v < 0.0) {
      if (v < kNegativeWeightFloor) {
        std::ostringstream msg;
        msg << "counting: weight " << v << " below the clamping floor " << kNegativeWeightFloor;
        throw NumericError(msg.str());
      }
      v = 0.0;
      ++dist.clamped;
    }
  }
  if (dist.clamped > 0) {
    std::cerr << "[ll] warning: clamped " << dist.clamped
              << " slightly negative counting weight(s) to zero\n";
  }
  dist.weights = std::move(w);
  return dist;
}

/// w'_j = <Phi, Proj_j Phi> for every eigenvalue j of N_phi via Lagrange
/// products prod_{l != j} (N_phi - l)/(j - l).
std::vector<double> lagrange_weights(const Matrix& nphi_onebody, const FockBasis& basis,
                                     const Vector& amps) {
  const int n = basis.particles();
  std::vector<double> w(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) {
    Vector v = amps;
    for (int l = 0; l <= n; ++l) {
      if (l == j) continue;
      Vector nv = apply_one_body(nphi_onebody, basis, v);
      v = (nv - double(l) * v) / (double(j) - double(l));
    }
    w[j] = std::real(amps.dot(v));
  }
  return w;
}

struct CountingContext {
  Matrix nphi;      // one-body |c><c| on the window
  Matrix qtq;       // (1-|c><c|) T (1-|c><c|)
};

CountingContext make_context(const FockVector& phi_n, const SpectralField& phi) {
  const ModeBasis& modes = phi_n.basis.modes();
  const Vector c = modes.window_normalized(phi);
  CountingContext ctx;
  ctx.nphi = c * c.adjoint();
  Matrix t = Matrix::Zero(modes.size(), modes.size());
  for (int p = 0; p < modes.size(); ++p) {
    const double k = modes.wavenumber(p);
    t(p, p) = k * k;
  }
  const Matrix q = Matrix::Identity(modes.size(), modes.size()) - ctx.nphi;
  ctx.qtq = q * t * q;
  return ctx;
}

}  // namespace

double CountingDistribution::sum() const {
  double s = 0.0;
  for (double v : weights) s += v;
  return s;
}

double CountingDistribution::mean_fraction() const {
  double s = 0.0;
  for (int k = 0; k <= particles; ++k) s += (double(k) / particles) * weights[k];
  return s;
}

double CountingDistribution::root_fraction() const {
  double s = 0.0;
  for (int k = 0; k <= particles; ++k) s += std::sqrt(double(k) / particles) * weights[k];
  return s;
}

std::vector<double> WeightFunction::tabulate() const {
  std::vector<double> out(particles + 1);
  for (int k = 0; k <= particles; ++k) out[k] = f(k);
  return out;
}

WeightFunction WeightFunction::m(int n) {
  return {[n](long long k) { return k >= 0 ? double(k) / n : 0.0; }, "m_N", n};
}

WeightFunction WeightFunction::n(int n) {
  return {[n](long long k) { return k >= 0 ? std::sqrt(double(k) / n) : 0.0; }, "n_N", n};
}

WeightFunction WeightFunction::from_table(std::vector<double> values, std::string name) {
  const int n = static_cast<int>(values.size()) - 1;
  auto tab = std::make_shared<std::vector<double>>(std::move(values));
  return {[tab](long long k) {
            return (k >= 0 && k < static_cast<long long>(tab->size())) ? (*tab)[k] : 0.0;
          },
          std::move(name), n};
}

WeightFunction WeightFunction::custom(std::function<double(long long)> f, std::string name,
                                      int n) {
  return {std::move(f), std::move(name), n};
}

WeightFunction WeightFunction::shifted(int s) const {
  auto base = f;
  return {[base, s](long long k) { return base(k + s); }, "tau_" + std::to_string(s) + " " + name,
          particles};
}

CountingDistribution pk_distribution(const FockVector& phi_n, const SpectralField& phi) {
  check_counting_inputs(phi_n);
  const int n = phi_n.basis.particles();
  const CountingContext ctx = make_context(phi_n, phi);

  // Fast path: moments of the bad-particle count B = N - N_phi (eigenvalue
  // j of N_phi, i.e. j particles in phi, leaves k = N - j bad ones), then
  // the dual Vandermonde solve over the nodes k = 0..N. Centering on B
  // keeps the moments tiny near a condensate, where accuracy matters most;
  // raw N_phi moments lose ~1e-11 at N = 8 on a pure product state.
  std::vector<double> mu(n + 1);
  Vector v = phi_n.amps;
  mu[0] = std::real(phi_n.amps.dot(v));
  for (int m = 1; m <= n; ++m) {
    v = double(n) * v - apply_one_body(ctx.nphi, phi_n.basis, v);
    mu[m] = std::real(phi_n.amps.dot(v));
  }
  std::vector<double> wk_fast = vandermonde_dual_solve(mu);
  if (distribution_plausible(wk_fast)) {
    return finalize(std::move(wk_fast), n, "moments");
  }
  // Robust path: Lagrange eigenprojectors applied to the state.
  const std::vector<double> wj = lagrange_weights(ctx.nphi, phi_n.basis, phi_n.amps);
  if (!distribution_plausible(wj)) {
    throw NumericError("pk_distribution: both the moment and the Lagrange path failed");
  }
  std::vector<double> wk(n + 1);
  for (int j = 0; j <= n; ++j) wk[n - j] = wj[j];
  return finalize(std::move(wk), n, "lagrange");
}

CountingDistribution pk_distribution_lagrange(const FockVector& phi_n, const SpectralField& phi) {
  check_counting_inputs(phi_n);
  const int n = phi_n.basis.particles();
  const CountingContext ctx = make_context(phi_n, phi);
  std::vector<double> wj = lagrange_weights(ctx.nphi, phi_n.basis, phi_n.amps);
  if (!distribution_plausible(wj)) {
    throw NumericError("pk_distribution_lagrange: implausible distribution");
  }
  std::vector<double> wk(n + 1);
  for (int j = 0; j <= n; ++j) wk[n - j] = wj[j];
  return finalize(std::move(wk), n, "lagrange");
}

double alpha_of(const CountingDistribution& dist) { return dist.mean_fraction(); }
double beta_of(const CountingDistribution& dist) { return dist.root_fraction(); }

double alpha(const FockVector& phi_n, const SpectralField& phi) {
  return alpha_of(pk_distribution(phi_n, phi));
}

double beta(const FockVector& phi_n, const SpectralField& phi) {
  return beta_of(pk_distribution(phi_n, phi));
}

FockVector hat_apply(const WeightFunction& f, const FockVector& phi_n, const SpectralField& phi) {
  check_counting_inputs(phi_n);
  const int n = phi_n.basis.particles();
  const CountingContext ctx = make_context(phi_n, phi);

  Vector out = Vector::Zero(phi_n.basis.dim());
  for (int j = 0; j <= n; ++j) {
    const double fk = f(n - j);  // eigenvalue j of N_phi <=> k = N - j
    if (fk == 0.0) continue;
    Vector v = phi_n.amps;
    for (int l = 0; l <= n; ++l) {
      if (l == j) continue;
      Vector nv = apply_one_body(ctx.nphi, phi_n.basis, v);
      v = (nv - double(l) * v) / (double(j) - double(l));
    }
    out += fk * v;
  }
  return FockVector(phi_n.basis, std::move(out));
}

double grad_q1_norm(const FockVector& phi_n, const SpectralField& phi) {
  const CountingContext ctx = make_context(phi_n, phi);
  const Vector v = apply_one_body(ctx.qtq, phi_n.basis, phi_n.amps);
  const double val = std::real(phi_n.amps.dot(v)) / phi_n.basis.particles();
  return std::max(0.0, val);
}

void save_counting_distribution(std::ostream& out, const CountingDistribution& dist) {
  out << "k,w_k,n_N,m_N\n";
  char buf[128];
  for (int k = 0; k <= dist.particles; ++k) {
    const double nn = std::sqrt(double(k) / dist.particles);
    const double mm = double(k) / dist.particles;
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", k, dist.weights[k], nn, mm);
    out << buf;
  }
}

}  // namespace ll
