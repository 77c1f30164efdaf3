#pragma once

#include <optional>

#include "ll/common.hpp"

namespace ll {

/// Declarative run configuration. Parsed from a flat `key = value` file
/// ('#' starts a comment); unknown keys are errors.
struct ExperimentConfig {
  // domain
  double box_length = 6.283185307179586;
  int grid_points = 64;
  int mode_window = 8;

  // many-body scan
  std::vector<int> n_list = {2, 3, 4};
  int kappa = 1;
  bool linear = false;  // disables both the interaction and the nonlinearity

  // regularization rule: fixed eps, or eps = N^{-eps_beta} when set
  double eps = 0.2;
  std::optional<double> eps_beta;
  std::vector<double> eps_list;  // sweep-eps abscissae, descending
  std::string potential_shape = "gaussian";

  // initial datum: named profile with parameters, or a field file
  std::string initial_profile = "gaussian";  // gaussian | sech | plane | rough | file
  double initial_width = 1.0;
  std::optional<double> initial_center;      // default L/2
  std::optional<double> initial_amplitude;   // default: unit-mass normalization
  int initial_mode = 1;                      // plane-wave mode integer
  double initial_tail_exponent = 0.7;        // rough-profile spectral decay
  std::string initial_file;

  // time stepping / sampling
  double t_final = 1.0;
  double dt = 1e-3;
  int sample_every = 100;
  double probe_time = 0.5;
  std::optional<double> eta;  // enables the mollification pipeline

  // tolerances and solver knobs
  double stability_bound = 64.0;
  int krylov_dim = 30;
  double krylov_tol = 1e-10;
  int max_substeps = 256;
  long long dim_cap = 5'000'000;

  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int workers = 1;

  /// eps for a given particle number under the configured rule.
  double eps_for(int n) const;

  void validate() const;

  /// Canonical `key = value` echo (deterministic order).
  std::vector<std::pair<std::string, std::string>> echo() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace ll
