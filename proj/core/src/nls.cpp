#include "ll/nls.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ll {

namespace {

bool admissible(double p, double q) {
  if (p < 2.0 || q < 2.0) return false;
  const double lhs = 2.0 / p;  // 0 when p = inf
  const double rhs = 0.5 - 1.0 / q;
  return std::abs(lhs - rhs) <= 1e-12;
}

void check_finite(const cvec& v, double t) {
  for (const cplx& x : v) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      double nrm2 = 0.0;
      for (const cplx& y : v) {
        const double a = std::norm(y);
        if (std::isfinite(a)) nrm2 += a;
      }
      std::ostringstream msg;
      msg << "nls_evolve diverged at t = " << t << " (finite-part norm^2 = " << nrm2 << ")";
      throw NumericError(msg.str());
    }
  }
}

}  // namespace

NlsTrajectory nls_evolve(const SpectralField& phi0, int kappa, double t_final, double dt,
                         int sample_every, const NlsOptions& opts) {
  if (kappa != 1 && kappa != -1 && kappa != 0) {
    throw std::invalid_argument("nls_evolve: kappa must be +1, -1 or 0");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("nls_evolve: dt must be positive");
  if (!std::isfinite(t_final)) throw std::invalid_argument("nls_evolve: t_final must be finite");
  if (sample_every < 1) throw std::invalid_argument("nls_evolve: sample_every must be >= 1");
  // negative t_final runs the reversed flow (time-reversal diagnostics)
  const double dt_signed = t_final < 0.0 ? -dt : dt;

  const TorusGrid& grid = phi0.grid;
  const double kmax = grid.nyquist();
  if (dt * kmax * kmax > opts.stability_bound) {
    std::ostringstream msg;
    msg << "nls_evolve: dt * max(k)^2 = " << dt * kmax * kmax
        << " exceeds the stability bound " << opts.stability_bound;
    throw ConfigError(msg.str());
  }

  const int m = grid.points();
  // Half-step kinetic phases e^{-i k^2 dt/2} in FFT index order.
  cvec half_kin(m);
  for (int i = 0; i < m; ++i) {
    const double k = grid.wavenumber(i);
    half_kin[i] = std::polar(1.0, -0.5 * k * k * dt_signed);
  }

  const long long n_steps = static_cast<long long>(std::llround(std::abs(t_final) / dt));

  NlsTrajectory traj;
  traj.kappa = kappa;
  traj.sample_dt = dt * sample_every;
  traj.times.push_back(0.0);
  traj.fields.push_back(phi0);

  if (n_steps == 0) return traj;

  cvec pos = phi0.values;
  cvec freq;
  for (long long step = 1; step <= n_steps; ++step) {
    grid.dft_forward(pos, freq);
    const double inv_m = 1.0 / m;
    for (int i = 0; i < m; ++i) freq[i] *= half_kin[i] * inv_m;
    grid.dft_inverse(freq, pos);
    if (kappa != 0) {
      for (cplx& v : pos) v *= std::polar(1.0, -kappa * std::norm(v) * dt_signed);
    }
    grid.dft_forward(pos, freq);
    for (int i = 0; i < m; ++i) freq[i] *= half_kin[i] * inv_m;
    grid.dft_inverse(freq, pos);

    check_finite(pos, step * dt_signed);
    if (step % sample_every == 0 || step == n_steps) {
      traj.times.push_back(step * dt_signed);
      traj.fields.emplace_back(grid, pos);
    }
  }
  return traj;
}

double nls_energy(const SpectralField& phi, int kappa) {
  const cvec c = phi.to_modes();
  double kin = 0.0;
  for (int i = 0; i < phi.grid.points(); ++i) {
    const double k = phi.grid.wavenumber(i);
    kin += k * k * std::norm(c[i]);
  }
  const double l4 = lq_norm(phi, 4.0);
  return kin + 0.5 * kappa * l4 * l4 * l4 * l4;
}

double strichartz_norm(const NlsTrajectory& traj, double p, double q) {
  if (!admissible(p, q)) {
    std::ostringstream msg;
    msg << "strichartz_norm: (" << p << ", " << q << ") is not Schroedinger admissible";
    throw std::invalid_argument(msg.str());
  }
  if (traj.fields.empty()) return 0.0;
  if (std::isinf(p)) {
    double best = 0.0;
    for (const SpectralField& f : traj.fields) best = std::max(best, lq_norm(f, q));
    return best;
  }
  double acc = 0.0;
  for (const SpectralField& f : traj.fields) acc += std::pow(lq_norm(f, q), p) * traj.sample_dt;
  return std::pow(acc, 1.0 / p);
}

DependenceReport dependence_gap(const SpectralField& phi0, const SpectralField& psi0, int kappa,
                                double t_final, double dt, int sample_every, double fit_constant,
                                const NlsOptions& opts) {
  if (!phi0.grid.same_as(psi0.grid)) {
    throw std::invalid_argument("dependence_gap: data live on different grids");
  }
  const NlsTrajectory a = nls_evolve(phi0, kappa, t_final, dt, sample_every, opts);
  const NlsTrajectory b = nls_evolve(psi0, kappa, t_final, dt, sample_every, opts);

  DependenceReport rep;
  {
    cvec d = phi0.values;
    for (std::size_t j = 0; j < d.size(); ++j) d[j] -= psi0.values[j];
    rep.initial_gap = SpectralField(phi0.grid, std::move(d)).mass();
    rep.initial_gap = std::sqrt(rep.initial_gap);
  }

  std::vector<double> gaps(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    cvec d = a.fields[i].values;
    for (std::size_t j = 0; j < d.size(); ++j) d[j] -= b.fields[i].values[j];
    gaps[i] = std::sqrt(SpectralField(phi0.grid, std::move(d)).mass());
    rep.sup_l2_gap = std::max(rep.sup_l2_gap, gaps[i]);
  }

  rep.strichartz_phi = strichartz_norm(a, 4.0, std::numeric_limits<double>::infinity());
  rep.strichartz_psi = strichartz_norm(b, 4.0, std::numeric_limits<double>::infinity());
  rep.bound = rep.initial_gap *
              std::exp(fit_constant * std::sqrt(t_final) *
                       (rep.strichartz_phi * rep.strichartz_phi +
                        rep.strichartz_psi * rep.strichartz_psi));

  // Least-squares slope of log gap(t) against t over samples with a
  // nonvanishing gap; 0 when fewer than two usable samples.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (gaps[i] <= 0.0) continue;
    const double x = a.times[i];
    const double y = std::log(gaps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2 && sxx * n - sx * sx > 0.0) {
    rep.fitted_log_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return rep;
}

double mollify_cutoff(int n_particles, double eta) {
  return std::pow(std::log(static_cast<double>(n_particles)), eta);
}

SpectralField mollify_initial_datum(const SpectralField& phi0, int n_particles, double eta) {
  if (n_particles < 2) throw std::invalid_argument("mollify_initial_datum: N must be >= 2");
  if (!(eta > 0.0)) throw std::invalid_argument("mollify_initial_datum: eta must be > 0");
  const double cutoff = mollify_cutoff(n_particles, eta);
  SpectralField low = lp_project(phi0, cutoff);
  const double m = low.mass();
  if (!(m > 1e-14)) {
    std::ostringstream msg;
    msg << "mollify_initial_datum: datum has no content below the frequency cutoff "
        << cutoff << " (low-frequency mass " << m << "); cannot renormalize";
    throw NumericError(msg.str());
  }
  return low.normalized();
}

}  // namespace ll
