#pragma once

#include "ll/config.hpp"
#include "ll/counting.hpp"
#include "ll/nls.hpp"
#include "ll/observables.hpp"
#include "ll/propagator.hpp"

namespace ll {

/// One sampled comparison point of a paired many-body / NLS run.
struct ResultRow {
  int n = 0;
  double eps = 0.0;
  double t = 0.0;
  double beta_n = 0.0;
  double alpha_n = 0.0;
  double trace_gap_k1 = 0.0;
  double trace_gap_k2 = 0.0;
  double fidelity_k1 = 0.0;
  double e_many = 0.0;      // microscopic energy per particle
  double e_nls = 0.0;       // NLS energy of phi(t)
  double energy_gap = 0.0;  // e_many - e_nls
  double grad_q1 = 0.0;
  double sandwich_margin = 0.0;
  // Wall time lives in the sidecar metadata; the CSV column stays 0 so
  // result tables are reproducible byte for byte.
  double runtime_seconds = 0.0;
};

std::string result_row_header();
std::string format_result_row(const ResultRow& row);

/// Initial datum from the configured profile on the configured grid.
SpectralField make_initial_datum(const ExperimentConfig& cfg, const TorusGrid& grid);

/// Windowed, renormalized copy of phi (the matched-data convention: the
/// product state and the NLS start from the same band-limited datum).
SpectralField windowed_datum(const SpectralField& phi, const ModeBasis& modes);

/// Evolves Phi_N under H_{N,eps} and phi under the NLS from matched data
/// and scores every sample. Requires t_final to be an integer number of
/// sample intervals dt * sample_every.
std::vector<ResultRow> run_pair(const ExperimentConfig& cfg, int n, double eps);

struct SlopeFit {
  std::string observable;
  double slope = 0.0;      // of log(value) against log(abscissa)
  double order = 0.0;      // fitted decay order, -slope
  double residual = 0.0;   // rms residual of the fit
  int points = 0;
  bool monotone_decreasing = false;
  bool identically_zero = false;
  double probe_time = 0.0;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<SlopeFit> fits;
  std::vector<std::string> failed_points;       // "(N=..., eps=...): reason"
  std::vector<std::pair<std::string, double>> point_runtimes;
};

/// N-sweep at the eps rule; fits log beta_N and log trace_gap_k1 against
/// log N at the probe time.
SweepResult sweep_n(const ExperimentConfig& cfg);

/// eps-sweep at fixed N = n_list.front() over eps_list (descending);
/// reports successive Cauchy differences and the fitted eps-order.
SweepResult sweep_eps(const ExperimentConfig& cfg);

/// One row of the mollified-data pipeline: both triangle-inequality legs
/// next to the high-frequency tail mass of the rough datum.
struct TheoremLRow {
  int n = 0;
  double eps = 0.0;
  double t = 0.0;
  double cutoff = 0.0;     // (log N)^eta
  double leg1 = 0.0;       // Tr|gamma^(1) - |phi_N><phi_N||
  double leg2 = 0.0;       // Tr||phi_N><phi_N| - |phi><phi||
  double total = 0.0;      // leg1 + leg2
  double tail_mass = 0.0;  // ||P_{>cutoff} phi_0||
};

struct TheoremLResult {
  std::vector<TheoremLRow> rows;
  std::vector<std::string> failed_points;
  std::vector<std::pair<std::string, double>> point_runtimes;
};

std::string theorem_l_header();
std::string format_theorem_l_row(const TheoremLRow& row);

/// Evolve many-body vs mollified NLS vs rough NLS from the initial data
/// of the L^2 convergence theorem. Requires cfg.eta in (0, 1/4) and a
/// datum with high-frequency content.
TheoremLResult theorem_l_pipeline(const ExperimentConfig& cfg);

/// Per-sample trajectory diagnostics for the NLS-only runner.
struct NlsDiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double sup = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

std::vector<NlsDiagnosticsRow> nls_diagnostics(const NlsTrajectory& traj);

// ---- output sinks -------------------------------------------------------

/// Writes comment header (version + config echo), the mandatory header
/// row, then data rows; atomic replace via a temp file.
void write_csv(const std::string& path, const ExperimentConfig& cfg, const std::string& header,
               const std::vector<std::string>& data_lines);

/// Data lines of an existing CSV produced by write_csv (empty if absent).
std::vector<std::string> read_csv_data_lines(const std::string& path);

/// Sidecar metadata (config echo, version, wall time, failures).
void write_sidecar(const std::string& path, const ExperimentConfig& cfg, const std::string& command,
                   double wall_seconds,
                   const std::vector<std::pair<std::string, double>>& point_runtimes,
                   const std::vector<std::string>& failed_points);

/// CLI driver shared by the tools binary and the tests.
/// Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 verification failure.
int run_cli(int argc, const char* const* argv);

}  // namespace ll
