#include "ll/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ll/verify.hpp"

namespace ll {

namespace {

namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double wall_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SpectralField load_field_file(const std::string& path, const TorusGrid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("initial_file: cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  std::uint32_t m = 0;
  double length = 0.0;
  in.read(reinterpret_cast<char*>(&m), sizeof(m));
  in.read(reinterpret_cast<char*>(&length), sizeof(length));
  if (!in || std::string(magic, 4) != "SFLD") throw ConfigError("initial_file: bad header");
  if (static_cast<int>(m) != grid.points() || std::abs(length - grid.length()) > 1e-12) {
    throw ConfigError("initial_file: grid does not match the configuration");
  }
  cvec values(m);
  for (auto& v : values) {
    double re = 0.0, im = 0.0;
    in.read(reinterpret_cast<char*>(&re), sizeof(re));
    in.read(reinterpret_cast<char*>(&im), sizeof(im));
    if (!in) throw ConfigError("initial_file: truncated");
    v = cplx(re, im);
  }
  return SpectralField(grid, std::move(values));
}

void save_field_file(const std::string& path, const SpectralField& f) {
  std::ofstream out(path, std::ios::binary);
  out.write("SFLD", 4);
  const std::uint32_t m = static_cast<std::uint32_t>(f.grid.points());
  const double length = f.grid.length();
  out.write(reinterpret_cast<const char*>(&m), sizeof(m));
  out.write(reinterpret_cast<const char*>(&length), sizeof(length));
  for (const cplx& v : f.values) {
    const double re = v.real(), im = v.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(re));
    out.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
  if (!out) throw ConfigError("field export: write failed");
}

double wrap_displacement(double d, double length) {
  return d - length * std::round(d / length);
}

PropagatorConfig propagator_config(const ExperimentConfig& cfg) {
  PropagatorConfig pc;
  pc.dt = cfg.dt * cfg.sample_every;
  pc.krylov_dim = cfg.krylov_dim;
  pc.tol = cfg.krylov_tol;
  pc.max_substeps = cfg.max_substeps;
  return pc;
}

long long checked_sample_count(const ExperimentConfig& cfg) {
  const double sample_dt = cfg.dt * cfg.sample_every;
  const double steps = cfg.t_final / sample_dt;
  const long long n = static_cast<long long>(std::llround(steps));
  if (std::abs(steps - n) > 1e-9) {
    throw ConfigError("t_final must be an integer number of sample intervals dt * sample_every");
  }
  return n;
}

struct SlopeAccumulator {
  std::vector<double> xs, ys;
  void add(double x, double y) {
    xs.push_back(x);
    ys.push_back(y);
  }
  /// least squares y = a + b x; returns {b, rms residual}
  std::pair<double, double> fit() const {
    const int n = static_cast<int>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (n < 2 || denom <= 0.0) return {0.0, 0.0};
    const double b = (n * sxy - sx * sy) / denom;
    const double a = (sy - b * sx) / n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = ys[i] - a - b * xs[i];
      ss += r * r;
    }
    return {b, std::sqrt(ss / n)};
  }
};

SlopeFit make_fit(const std::string& name, const std::vector<double>& abscissa,
                  const std::vector<double>& values, double probe_time) {
  SlopeFit fit;
  fit.observable = name;
  fit.points = static_cast<int>(values.size());
  fit.probe_time = probe_time;
  fit.monotone_decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1])) fit.monotone_decreasing = false;
  }
  fit.identically_zero = true;
  for (double v : values) {
    if (std::abs(v) > 1e-12) fit.identically_zero = false;  // gaps at round-off are "zero"
  }
  if (fit.identically_zero) return fit;
  SlopeAccumulator acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0) acc.add(std::log(abscissa[i]), std::log(values[i]));
  }
  const auto [slope, resid] = acc.fit();
  fit.slope = slope;
  fit.order = -slope;
  fit.residual = resid;
  return fit;
}

/// Generic worker pool over independent points; results keep input order.
template <typename Point, typename Fn>
void run_points(const std::vector<Point>& points, int workers, Fn&& fn) {
  if (workers <= 1 || points.size() <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(workers, static_cast<int>(points.size()));
  pool.reserve(count);
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace

std::string result_row_header() {
  return "N,eps,t,beta_N,alpha_N,trace_gap_k1,trace_gap_k2,fidelity_k1,E_N,E_phi,energy_gap,"
         "grad_q1,sandwich_margin,runtime_seconds";
}

std::string format_result_row(const ResultRow& r) {
  std::ostringstream out;
  out << r.n << ',' << fmt(r.eps) << ',' << fmt(r.t) << ',' << fmt(r.beta_n) << ','
      << fmt(r.alpha_n) << ',' << fmt(r.trace_gap_k1) << ',' << fmt(r.trace_gap_k2) << ','
      << fmt(r.fidelity_k1) << ',' << fmt(r.e_many) << ',' << fmt(r.e_nls) << ','
      << fmt(r.energy_gap) << ',' << fmt(r.grad_q1) << ',' << fmt(r.sandwich_margin) << ','
      << fmt(r.runtime_seconds);
  return out.str();
}

SpectralField make_initial_datum(const ExperimentConfig& cfg, const TorusGrid& grid) {
  const double length = grid.length();
  const double center = cfg.initial_center.value_or(0.5 * length);

  if (cfg.initial_profile == "file") return load_field_file(cfg.initial_file, grid);

  if (cfg.initial_profile == "plane") {
    cvec modes(grid.points(), cplx(0.0));
    modes[grid.index_of_mode(cfg.initial_mode)] = 1.0;
    SpectralField f = SpectralField::from_modes(grid, modes);
    if (cfg.initial_amplitude) {
      const double target = *cfg.initial_amplitude;
      for (cplx& v : f.values) v *= target * std::sqrt(length);
    }
    return f;  // unit mass unless amplitude was forced
  }

  cvec values(grid.points());
  if (cfg.initial_profile == "gaussian") {
    const double w = cfg.initial_width;
    for (int j = 0; j < grid.points(); ++j) {
      const double d = wrap_displacement(grid.node(j) - center, length);
      values[j] = std::exp(-d * d / (4.0 * w * w));
    }
  } else if (cfg.initial_profile == "sech") {
    const double w = cfg.initial_width;
    for (int j = 0; j < grid.points(); ++j) {
      const double d = wrap_displacement(grid.node(j) - center, length);
      values[j] = 1.0 / std::cosh(d / w);
    }
  } else if (cfg.initial_profile == "rough") {
    // randomized-phase power-law spectrum |c_n| ~ (1+|n|)^{-p}
    Rng rng(cfg.seed ^ 0x10f6ull);
    cvec modes(grid.points());
    for (int i = 0; i < grid.points(); ++i) {
      const int n = grid.mode_of_index(i);
      const double mag = std::pow(1.0 + std::abs(n), -cfg.initial_tail_exponent);
      modes[i] = std::polar(mag, rng.uniform(0.0, 2.0 * std::numbers::pi));
    }
    SpectralField f = SpectralField::from_modes(grid, modes);
    return f.normalized();
  } else {
    throw ConfigError("make_initial_datum: unknown profile '" + cfg.initial_profile + "'");
  }

  SpectralField f(grid, std::move(values));
  if (cfg.initial_amplitude) {
    for (cplx& v : f.values) v *= *cfg.initial_amplitude;
    return f;
  }
  return f.normalized();
}

SpectralField windowed_datum(const SpectralField& phi, const ModeBasis& modes) {
  return modes.unwindow(modes.window_normalized(phi));
}

namespace {

ResultRow score_sample(int n, double eps, double t, const FockVector& state,
                       const SpectralField& phi_t, const SparseHermitian& h, int kappa_nls) {
  ResultRow row;
  row.n = n;
  row.eps = eps;
  row.t = t;

  const CountingDistribution dist = pk_distribution(state, phi_t);
  row.alpha_n = alpha_of(dist);
  row.beta_n = beta_of(dist);

  const DensityMatrix g1 = rdm1(state);
  row.trace_gap_k1 = trace_norm_gap(g1, phi_t);
  row.fidelity_k1 = fidelity(g1, phi_t);
  if (n >= 2) {
    const DensityMatrix g2 = rdm2(state);
    row.trace_gap_k2 = trace_norm_gap(g2, phi_t);
  }
  row.e_many = energy_per_particle(state, h);
  row.e_nls = nls_energy(phi_t, kappa_nls);
  row.energy_gap = row.e_many - row.e_nls;
  row.grad_q1 = grad_q1_norm(state, phi_t);
  row.sandwich_margin = sandwich_check(g1, phi_t).margin();
  return row;
}

}  // namespace

std::vector<ResultRow> run_pair(const ExperimentConfig& cfg, int n, double eps) {
  const TorusGrid grid(cfg.box_length, cfg.grid_points);
  const ModeBasis modes(grid, cfg.mode_window);
  const FockBasis basis = enumerate_basis(n, modes, cfg.dim_cap);

  const SpectralField phi0 = make_initial_datum(cfg, grid);
  const SpectralField phi_w = windowed_datum(phi0, modes);

  const int kappa_eff = cfg.linear ? 0 : cfg.kappa;
  NlsOptions nls_opts;
  nls_opts.stability_bound = cfg.stability_bound;
  const long long n_samples = checked_sample_count(cfg);
  const NlsTrajectory traj =
      nls_evolve(phi_w, kappa_eff, cfg.t_final, cfg.dt, cfg.sample_every, nls_opts);
  if (static_cast<long long>(traj.size()) != n_samples + 1) {
    throw NumericError("run_pair: sample bookkeeping mismatch");
  }

  const TwoBodyKernel kernel =
      potential_coefficients(potential_shape_from_name(cfg.potential_shape), eps, modes);
  const SparseHermitian h = build_hamiltonian(basis, kernel, kappa_eff);
  const PropagatorConfig pc = propagator_config(cfg);

  std::vector<ResultRow> rows;
  FockVector state = product_state(phi_w, basis);
  rows.push_back(score_sample(n, eps, 0.0, state, traj.at(0), h, kappa_eff));
  for (long long j = 1; j <= n_samples; ++j) {
    state = expm_apply(h, state, pc.dt, pc);
    rows.push_back(score_sample(n, eps, traj.times[j], state, traj.at(j), h, kappa_eff));
  }
  return rows;
}

namespace {

struct PointKey {
  int n;
  double eps;
  std::string label() const { return "(N=" + std::to_string(n) + ", eps=" + fmt(eps) + ")"; }
};

SweepResult run_sweep_points(const ExperimentConfig& cfg, const std::vector<PointKey>& points) {
  SweepResult result;
  std::vector<std::vector<ResultRow>> per_point(points.size());
  std::vector<std::string> errors(points.size());
  std::vector<double> runtimes(points.size(), 0.0);

  run_points(points, cfg.workers, [&](std::size_t i) {
    const auto started = std::chrono::steady_clock::now();
    try {
      per_point[i] = run_pair(cfg, points[i].n, points[i].eps);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    runtimes[i] = wall_since(started);
  });

  for (std::size_t i = 0; i < points.size(); ++i) {
    result.point_runtimes.emplace_back(points[i].label(), runtimes[i]);
    if (!errors[i].empty()) {
      result.failed_points.push_back(points[i].label() + ": " + errors[i]);
      continue;
    }
    for (const ResultRow& r : per_point[i]) result.rows.push_back(r);
  }
  return result;
}

/// Row nearest to the probe time for each point, for the trend fits.
std::vector<ResultRow> probe_rows(const std::vector<ResultRow>& rows,
                                  const std::vector<PointKey>& points, double probe_time) {
  std::vector<ResultRow> out;
  for (const PointKey& p : points) {
    const ResultRow* best = nullptr;
    for (const ResultRow& r : rows) {
      if (r.n != p.n || r.eps != p.eps) continue;
      if (!best || std::abs(r.t - probe_time) < std::abs(best->t - probe_time)) best = &r;
    }
    if (best) out.push_back(*best);
  }
  return out;
}

}  // namespace

SweepResult sweep_n(const ExperimentConfig& cfg) {
  if (cfg.n_list.size() < 3) throw ConfigError("sweep-n needs at least 3 values in n_list");
  std::vector<PointKey> points;
  for (int n : cfg.n_list) points.push_back({n, cfg.eps_for(n)});

  SweepResult result = run_sweep_points(cfg, points);

  const auto probes = probe_rows(result.rows, points, cfg.probe_time);
  if (probes.size() >= 3) {
    std::vector<double> ns, betas, gaps;
    for (const ResultRow& r : probes) {
      ns.push_back(r.n);
      betas.push_back(r.beta_n);
      gaps.push_back(r.trace_gap_k1);
    }
    const double t_star = probes.front().t;
    result.fits.push_back(make_fit("beta_N", ns, betas, t_star));
    result.fits.push_back(make_fit("trace_gap_k1", ns, gaps, t_star));
  }
  return result;
}

SweepResult sweep_eps(const ExperimentConfig& cfg) {
  if (cfg.eps_list.size() < 2) throw ConfigError("sweep-eps needs eps_list with >= 2 values");
  const int n = cfg.n_list.front();
  std::vector<PointKey> points;
  for (double e : cfg.eps_list) points.push_back({n, e});

  SweepResult result = run_sweep_points(cfg, points);

  const auto probes = probe_rows(result.rows, points, cfg.probe_time);
  if (probes.size() >= 2) {
    std::vector<double> eps, betas, gaps;
    for (const ResultRow& r : probes) {
      eps.push_back(r.eps);
      betas.push_back(r.beta_n);
      gaps.push_back(r.trace_gap_k1);
    }
    const double t_star = probes.front().t;
    // Cauchy successive differences against the next smaller eps
    SlopeFit beta_diff;
    beta_diff.observable = "beta_N_cauchy_max";
    beta_diff.points = static_cast<int>(probes.size()) - 1;
    beta_diff.probe_time = t_star;
    double worst = 0.0;
    bool shrinking = true;
    double prev = -1.0;
    for (std::size_t i = 1; i < probes.size(); ++i) {
      const double d = std::abs(betas[i] - betas[i - 1]);
      worst = std::max(worst, d);
      if (prev >= 0.0 && !(d <= prev)) shrinking = false;
      prev = d;
    }
    beta_diff.slope = worst;
    beta_diff.monotone_decreasing = shrinking;
    result.fits.push_back(beta_diff);
    // fitted eps-order of the dynamical part: value(eps) - value(eps_min)
    std::vector<double> eps_rel, gap_rel;
    for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
      eps_rel.push_back(eps[i]);
      gap_rel.push_back(std::abs(gaps[i] - gaps.back()));
    }
    SlopeFit eps_order = make_fit("trace_gap_k1_eps_order", eps_rel, gap_rel, t_star);
    eps_order.order = eps_order.slope;  // growth exponent in eps, positive when Cauchy in eps
    result.fits.push_back(eps_order);
  }
  return result;
}

std::string theorem_l_header() {
  return "N,eps,t,cutoff,leg1,leg2,total,tail_mass";
}

std::string format_theorem_l_row(const TheoremLRow& r) {
  std::ostringstream out;
  out << r.n << ',' << fmt(r.eps) << ',' << fmt(r.t) << ',' << fmt(r.cutoff) << ','
      << fmt(r.leg1) << ',' << fmt(r.leg2) << ',' << fmt(r.total) << ',' << fmt(r.tail_mass);
  return out.str();
}

TheoremLResult theorem_l_pipeline(const ExperimentConfig& cfg) {
  if (!cfg.eta) throw ConfigError("theorem-l requires eta in the config");
  const double eta = *cfg.eta;
  if (!(eta > 0.0 && eta < 0.25)) throw ConfigError("theorem-l: eta must lie in (0, 1/4)");

  const TorusGrid grid(cfg.box_length, cfg.grid_points);
  const ModeBasis modes(grid, cfg.mode_window);
  const SpectralField phi0 = make_initial_datum(cfg, grid).normalized();

  const int kappa_eff = cfg.linear ? 0 : cfg.kappa;
  NlsOptions nls_opts;
  nls_opts.stability_bound = cfg.stability_bound;
  const long long n_samples = checked_sample_count(cfg);
  const NlsTrajectory rough =
      nls_evolve(phi0, kappa_eff, cfg.t_final, cfg.dt, cfg.sample_every, nls_opts);

  const double window_edge = std::abs(modes.wavenumber(0));  // most negative mode
  TheoremLResult result;

  std::vector<PointKey> points;
  for (int n : cfg.n_list) points.push_back({n, cfg.eps_for(n)});

  std::vector<std::vector<TheoremLRow>> per_point(points.size());
  std::vector<std::string> errors(points.size());
  std::vector<double> runtimes(points.size(), 0.0);

  run_points(points, cfg.workers, [&](std::size_t i) {
    const auto started = std::chrono::steady_clock::now();
    try {
      const int n = points[i].n;
      const double eps = points[i].eps;
      const double cutoff = mollify_cutoff(n, eta);
      if (cutoff >= window_edge) {
        throw ConfigError("mollification cutoff " + fmt(cutoff) +
                          " does not fit inside the mode window (edge " + fmt(window_edge) + ")");
      }
      const SpectralField phi_n0 = mollify_initial_datum(phi0, n, eta);
      const double tail = lp_tail_norm(phi0, cutoff);

      const NlsTrajectory moll =
          nls_evolve(phi_n0, kappa_eff, cfg.t_final, cfg.dt, cfg.sample_every, nls_opts);

      const FockBasis basis = enumerate_basis(n, modes, cfg.dim_cap);
      const TwoBodyKernel kernel =
          potential_coefficients(potential_shape_from_name(cfg.potential_shape), eps, modes);
      const SparseHermitian h = build_hamiltonian(basis, kernel, kappa_eff);
      const PropagatorConfig pc = propagator_config(cfg);

      FockVector state = product_state(phi_n0, basis);
      for (long long j = 0; j <= n_samples; ++j) {
        if (j > 0) state = expm_apply(h, state, pc.dt, pc);
        TheoremLRow row;
        row.n = n;
        row.eps = eps;
        row.t = moll.times[j];
        row.cutoff = cutoff;
        row.leg1 = trace_norm_gap(rdm1(state), moll.at(j));
        row.leg2 = pure_state_trace_gap(moll.at(j), rough.at(j));
        row.total = row.leg1 + row.leg2;
        row.tail_mass = tail;
        per_point[i].push_back(row);
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    runtimes[i] = wall_since(started);
  });

  for (std::size_t i = 0; i < points.size(); ++i) {
    result.point_runtimes.emplace_back(points[i].label(), runtimes[i]);
    if (!errors[i].empty()) {
      result.failed_points.push_back(points[i].label() + ": " + errors[i]);
      continue;
    }
    for (const TheoremLRow& r : per_point[i]) result.rows.push_back(r);
  }
  return result;
}

std::vector<NlsDiagnosticsRow> nls_diagnostics(const NlsTrajectory& traj) {
  std::vector<NlsDiagnosticsRow> rows;
  rows.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const SpectralField& f = traj.at(i);
    NlsDiagnosticsRow r;
    r.t = traj.times[i];
    r.mass = f.mass();
    r.energy = nls_energy(f, traj.kappa);
    r.sup = sup_norm(f);
    r.h1 = sobolev_norm(f, 1.0);
    r.h2 = sobolev_norm(f, 2.0);
    rows.push_back(r);
  }
  return rows;
}

// ---- sinks -----------------------------------------------------------------

void write_csv(const std::string& path, const ExperimentConfig& cfg, const std::string& header,
               const std::vector<std::string>& data_lines) {
  fs::create_directories(fs::path(path).parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + tmp + "' for writing");
    out << "# liebliniger " << kVersion << "\n";
    for (const auto& [k, v] : cfg.echo()) {
      // out_dir and workers are execution environment, not experiment
      // definition; keeping them out makes equal runs byte-identical.
      // The sidecar JSON records the complete effective config.
      if (k == "out_dir" || k == "workers") continue;
      out << "# " << k << " = " << v << "\n";
    }
    out << header << "\n";
    for (const std::string& line : data_lines) out << line << "\n";
    if (!out) throw ConfigError("write failed for '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

std::vector<std::string> read_csv_data_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  if (!in) return lines;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // header row
      continue;
    }
    lines.push_back(line);
  }
  return lines;
}

void write_sidecar(const std::string& path, const ExperimentConfig& cfg, const std::string& command,
                   double wall_seconds,
                   const std::vector<std::pair<std::string, double>>& point_runtimes,
                   const std::vector<std::string>& failed_points) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["wall_seconds"] = wall_seconds;
  nlohmann::json cfg_json = nlohmann::json::object();
  for (const auto& [k, v] : cfg.echo()) cfg_json[k] = v;
  j["config"] = cfg_json;
  nlohmann::json rt = nlohmann::json::object();
  for (const auto& [k, v] : point_runtimes) rt[k] = v;
  j["point_runtimes_seconds"] = rt;
  j["failed_points"] = failed_points;

  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

// ---- CLI -------------------------------------------------------------------

namespace {

/// Merge freshly computed rows with rows already present for other points;
/// final order follows `points`, then time (the stored row order).
std::vector<std::string> merge_point_lines(
    const std::vector<PointKey>& points,
    const std::map<std::string, std::vector<std::string>>& existing,
    const std::map<std::string, std::vector<std::string>>& fresh) {
  std::vector<std::string> out;
  for (const PointKey& p : points) {
    const std::string key = std::to_string(p.n) + "," + fmt(p.eps);
    const auto fit = fresh.find(key);
    if (fit != fresh.end()) {
      out.insert(out.end(), fit->second.begin(), fit->second.end());
      continue;
    }
    const auto eit = existing.find(key);
    if (eit != existing.end()) out.insert(out.end(), eit->second.begin(), eit->second.end());
  }
  return out;
}

std::map<std::string, std::vector<std::string>> group_by_point(
    const std::vector<std::string>& lines) {
  std::map<std::string, std::vector<std::string>> grouped;
  for (const std::string& line : lines) {
    const auto c1 = line.find(',');
    if (c1 == std::string::npos) continue;
    const auto c2 = line.find(',', c1 + 1);
    if (c2 == std::string::npos) continue;
    grouped[line.substr(0, c2)].push_back(line);
  }
  return grouped;
}

std::string fits_header() {
  return "observable,probe_time,slope,order,residual,points,monotone_decreasing,identically_zero";
}

std::string format_fit(const SlopeFit& f) {
  std::ostringstream out;
  out << f.observable << ',' << fmt(f.probe_time) << ',' << fmt(f.slope) << ',' << fmt(f.order)
      << ',' << fmt(f.residual) << ',' << f.points << ',' << (f.monotone_decreasing ? 1 : 0) << ','
      << (f.identically_zero ? 1 : 0);
  return out.str();
}

/// Minimal parse of a stored row: leading numeric columns up to trace_gap_k1.
ResultRow parse_row_prefix(const std::string& line) {
  ResultRow r;
  std::sscanf(line.c_str(), "%d,%lg,%lg,%lg,%lg,%lg", &r.n, &r.eps, &r.t, &r.beta_n, &r.alpha_n,
              &r.trace_gap_k1);
  return r;
}

int run_sweep_command(const ExperimentConfig& cfg, const std::string& command,
                      const std::vector<PointKey>& points, bool fit_n_orders,
                      const std::chrono::steady_clock::time_point& started) {
  // resumability: points with rows already in the CSV are not recomputed
  const std::string csv_path = cfg.out_dir + "/" + command + ".csv";
  const auto existing = group_by_point(read_csv_data_lines(csv_path));
  std::vector<PointKey> missing;
  for (const PointKey& p : points) {
    if (!existing.count(std::to_string(p.n) + "," + fmt(p.eps))) missing.push_back(p);
  }
  SweepResult result;
  if (!missing.empty()) result = run_sweep_points(cfg, missing);

  std::map<std::string, std::vector<std::string>> fresh;
  for (const ResultRow& r : result.rows) {
    fresh[std::to_string(r.n) + "," + fmt(r.eps)].push_back(format_result_row(r));
  }
  const std::vector<std::string> merged = merge_point_lines(points, existing, fresh);
  write_csv(csv_path, cfg, result_row_header(), merged);

  // fits run over the merged table so resumed sweeps still report orders
  std::vector<ResultRow> table;
  table.reserve(merged.size());
  for (const std::string& line : merged) table.push_back(parse_row_prefix(line));
  const auto probes = probe_rows(table, points, cfg.probe_time);

  std::vector<SlopeFit> fits;
  if (fit_n_orders && probes.size() >= 3) {
    std::vector<double> ns, betas, gaps;
    for (const ResultRow& r : probes) {
      ns.push_back(r.n);
      betas.push_back(r.beta_n);
      gaps.push_back(r.trace_gap_k1);
    }
    fits.push_back(make_fit("beta_N", ns, betas, probes.front().t));
    fits.push_back(make_fit("trace_gap_k1", ns, gaps, probes.front().t));
  } else if (!fit_n_orders && probes.size() >= 2) {
    std::vector<double> eps, betas, gaps;
    for (const ResultRow& r : probes) {
      eps.push_back(r.eps);
      betas.push_back(r.beta_n);
      gaps.push_back(r.trace_gap_k1);
    }
    SlopeFit beta_diff;
    beta_diff.observable = "beta_N_cauchy_max";
    beta_diff.points = static_cast<int>(probes.size()) - 1;
    beta_diff.probe_time = probes.front().t;
    double worst = 0.0, prev = -1.0;
    bool shrinking = true;
    for (std::size_t i = 1; i < probes.size(); ++i) {
      const double d = std::abs(betas[i] - betas[i - 1]);
      worst = std::max(worst, d);
      if (prev >= 0.0 && !(d <= prev)) shrinking = false;
      prev = d;
    }
    beta_diff.slope = worst;
    beta_diff.monotone_decreasing = shrinking;
    fits.push_back(beta_diff);
    std::vector<double> eps_rel, gap_rel;
    for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
      eps_rel.push_back(eps[i]);
      gap_rel.push_back(std::abs(gaps[i] - gaps.back()));
    }
    SlopeFit eps_order = make_fit("trace_gap_k1_eps_order", eps_rel, gap_rel, probes.front().t);
    eps_order.order = eps_order.slope;  // growth exponent in eps, positive when Cauchy in eps
    fits.push_back(eps_order);
  }
  if (!fits.empty()) {
    std::vector<std::string> fit_lines;
    for (const SlopeFit& f : fits) fit_lines.push_back(format_fit(f));
    write_csv(cfg.out_dir + "/" + command + "_fits.csv", cfg, fits_header(), fit_lines);
  }
  write_sidecar(cfg.out_dir + "/" + command + ".json", cfg, command, wall_since(started),
                result.point_runtimes, result.failed_points);
  for (const std::string& f : result.failed_points) {
    std::cerr << "[ll] point failed: " << f << "\n";
  }
  std::cout << "wrote " << csv_path << " (" << merged.size() << " rows)\n";
  return result.failed_points.empty() ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Lieb-Liniger mean-field laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_override;
  int workers_override = -1;
  std::uint64_t seed_override = 0;
  bool seed_set = false;

  app.add_option("--config", config_path, "configuration file (key = value)");
  app.add_option("--out", out_override, "output directory (overrides config)");
  app.add_option("--workers", workers_override, "worker threads for sweep points");
  app.add_option("--seed", seed_override, "random seed (overrides config)")
      ->each([&seed_set](const std::string&) { seed_set = true; });

  auto* cmd_nls = app.add_subcommand("nls-run", "evolve the NLS and export diagnostics");
  auto* cmd_mb = app.add_subcommand("manybody-run", "one paired many-body/NLS point");
  auto* cmd_sweep_n = app.add_subcommand("sweep-n", "sweep the particle number N");
  auto* cmd_sweep_eps = app.add_subcommand("sweep-eps", "sweep the regularization eps");
  auto* cmd_theorem_l = app.add_subcommand("theorem-l", "mollified-data pipeline");
  auto* cmd_verify = app.add_subcommand("verify", "run the lemma/oracle property suites");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = parse_config_file(config_path);
    } else if (!cmd_verify->parsed()) {
      throw ConfigError("--config is required for this subcommand");
    }
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (workers_override > 0) cfg.workers = workers_override;
    if (seed_set) cfg.seed = seed_override;

    if (cmd_verify->parsed()) {
      const VerifyReport report = run_verification(cfg.seed);
      std::cout << format_verify_report(report);
      return report.all_pass() ? 0 : 3;
    }

    if (cmd_nls->parsed()) {
      const TorusGrid grid(cfg.box_length, cfg.grid_points);
      const SpectralField phi0 = make_initial_datum(cfg, grid);
      NlsOptions opts;
      opts.stability_bound = cfg.stability_bound;
      const NlsTrajectory traj = nls_evolve(phi0, cfg.linear ? 0 : cfg.kappa, cfg.t_final, cfg.dt,
                                            cfg.sample_every, opts);
      std::vector<std::string> lines;
      for (const NlsDiagnosticsRow& r : nls_diagnostics(traj)) {
        std::ostringstream o;
        o << fmt(r.t) << ',' << fmt(r.mass) << ',' << fmt(r.energy) << ',' << fmt(r.sup) << ','
          << fmt(r.h1) << ',' << fmt(r.h2);
        lines.push_back(o.str());
      }
      write_csv(cfg.out_dir + "/nls-run.csv", cfg, "t,mass,energy,sup_norm,h1_norm,h2_norm", lines);
      save_field_file(cfg.out_dir + "/initial_datum.field", phi0);
      write_sidecar(cfg.out_dir + "/nls-run.json", cfg, "nls-run", wall_since(started), {}, {});
      std::cout << "wrote " << cfg.out_dir << "/nls-run.csv (" << lines.size() << " rows)\n";
      return 0;
    }

    if (cmd_mb->parsed()) {
      const int n = cfg.n_list.front();
      const double eps = cfg.eps_for(n);
      const std::vector<ResultRow> rows = run_pair(cfg, n, eps);
      std::vector<std::string> lines;
      for (const ResultRow& r : rows) lines.push_back(format_result_row(r));
      write_csv(cfg.out_dir + "/manybody-run.csv", cfg, result_row_header(), lines);

      // terminal-state artifacts: Fock snapshot, 1-RDM, counting distribution
      {
        const TorusGrid grid(cfg.box_length, cfg.grid_points);
        const ModeBasis modes(grid, cfg.mode_window);
        const FockBasis basis = enumerate_basis(n, modes, cfg.dim_cap);
        const SpectralField phi_w = windowed_datum(make_initial_datum(cfg, grid), modes);
        const TwoBodyKernel kernel = potential_coefficients(
            potential_shape_from_name(cfg.potential_shape), eps, modes);
        const SparseHermitian h = build_hamiltonian(basis, kernel, cfg.linear ? 0 : cfg.kappa);
        PropagatorConfig pc = propagator_config(cfg);
        FockVector state = product_state(phi_w, basis);
        if (cfg.t_final > 0.0) state = expm_apply(h, state, cfg.t_final, pc);
        const NlsTrajectory traj = nls_evolve(phi_w, cfg.linear ? 0 : cfg.kappa, cfg.t_final,
                                              cfg.dt, cfg.sample_every);
        fs::create_directories(cfg.out_dir);
        {
          std::ofstream out(cfg.out_dir + "/state_final.fkv", std::ios::binary);
          save_fock_vector(out, state);
        }
        {
          std::ofstream out(cfg.out_dir + "/rdm1_final.bin", std::ios::binary);
          save_density_matrix(out, rdm1(state));
        }
        {
          std::ofstream out(cfg.out_dir + "/counting_final.csv");
          save_counting_distribution(out, pk_distribution(state, traj.fields.back()));
        }
      }
      write_sidecar(cfg.out_dir + "/manybody-run.json", cfg, "manybody-run", wall_since(started),
                    {{"(N=" + std::to_string(n) + ", eps=" + fmt(eps) + ")", wall_since(started)}},
                    {});
      std::cout << "wrote " << cfg.out_dir << "/manybody-run.csv (" << lines.size() << " rows)\n";
      return 0;
    }

    if (cmd_sweep_n->parsed()) {
      if (cfg.n_list.size() < 3) throw ConfigError("sweep-n needs at least 3 values in n_list");
      std::vector<PointKey> points;
      for (int n : cfg.n_list) points.push_back({n, cfg.eps_for(n)});
      return run_sweep_command(cfg, "sweep-n", points, true, started);
    }

    if (cmd_sweep_eps->parsed()) {
      if (cfg.eps_list.size() < 2) throw ConfigError("sweep-eps needs eps_list with >= 2 values");
      std::vector<PointKey> points;
      for (double e : cfg.eps_list) points.push_back({cfg.n_list.front(), e});
      return run_sweep_command(cfg, "sweep-eps", points, false, started);
    }

    if (cmd_theorem_l->parsed()) {
      const TheoremLResult result = theorem_l_pipeline(cfg);
      std::vector<std::string> lines;
      for (const TheoremLRow& r : result.rows) lines.push_back(format_theorem_l_row(r));
      write_csv(cfg.out_dir + "/theorem-l.csv", cfg, theorem_l_header(), lines);
      write_sidecar(cfg.out_dir + "/theorem-l.json", cfg, "theorem-l", wall_since(started),
                    result.point_runtimes, result.failed_points);
      std::cout << "wrote " << cfg.out_dir << "/theorem-l.csv (" << lines.size() << " rows)\n";
      return result.failed_points.empty() ? 0 : 2;
    }
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ll
