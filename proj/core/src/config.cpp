#include "ll/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ll {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const std::string& v, F convert) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(convert(key, item));
  }
  if (out.empty()) throw ConfigError("config: key '" + key + "' expects a nonempty list");
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

double ExperimentConfig::eps_for(int n) const {
  if (eps_beta) return std::pow(double(n), -*eps_beta);
  return eps;
}

void ExperimentConfig::validate() const {
  if (n_list.empty()) throw ConfigError("config: n_list must be nonempty");
  for (int n : n_list) {
    if (n < 1) throw ConfigError("config: every N in n_list must be >= 1");
  }
  if (kappa != 1 && kappa != -1) throw ConfigError("config: kappa must be +1 or -1");
  if (!(t_final >= 0.0)) throw ConfigError("config: t_final must be >= 0");
  if (!(dt > 0.0)) throw ConfigError("config: dt must be positive");
  if (sample_every < 1) throw ConfigError("config: sample_every must be >= 1");
  if (eta && !(*eta > 0.0 && *eta < 0.25)) {
    throw ConfigError("config: eta must lie in (0, 1/4)");
  }
  if (workers < 1) throw ConfigError("config: workers must be >= 1");
  if (initial_profile == "file") {
    if (initial_file.empty()) throw ConfigError("config: initial_profile = file needs initial_file");
    if (!std::filesystem::exists(initial_file)) {
      throw ConfigError("config: initial_file '" + initial_file + "' does not exist");
    }
  } else if (initial_profile != "gaussian" && initial_profile != "sech" &&
             initial_profile != "plane" && initial_profile != "rough") {
    throw ConfigError("config: unknown initial_profile '" + initial_profile + "'");
  }
  if (!eps_list.empty()) {
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
      if (!(eps_list[i] < eps_list[i - 1])) {
        throw ConfigError("config: eps_list must be strictly descending");
      }
    }
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto add = [&kv](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  add("box_length", fmt_double(box_length));
  add("grid_points", std::to_string(grid_points));
  add("mode_window", std::to_string(mode_window));
  {
    std::string s;
    for (std::size_t i = 0; i < n_list.size(); ++i) s += (i ? "," : "") + std::to_string(n_list[i]);
    add("n_list", s);
  }
  add("kappa", std::to_string(kappa));
  add("linear", linear ? "true" : "false");
  add("eps", fmt_double(eps));
  if (eps_beta) add("eps_beta", fmt_double(*eps_beta));
  if (!eps_list.empty()) {
    std::string s;
    for (std::size_t i = 0; i < eps_list.size(); ++i) s += (i ? "," : "") + fmt_double(eps_list[i]);
    add("eps_list", s);
  }
  add("potential_shape", potential_shape);
  add("initial_profile", initial_profile);
  add("initial_width", fmt_double(initial_width));
  if (initial_center) add("initial_center", fmt_double(*initial_center));
  if (initial_amplitude) add("initial_amplitude", fmt_double(*initial_amplitude));
  add("initial_mode", std::to_string(initial_mode));
  add("initial_tail_exponent", fmt_double(initial_tail_exponent));
  if (!initial_file.empty()) add("initial_file", initial_file);
  add("t_final", fmt_double(t_final));
  add("dt", fmt_double(dt));
  add("sample_every", std::to_string(sample_every));
  add("probe_time", fmt_double(probe_time));
  if (eta) add("eta", fmt_double(*eta));
  add("stability_bound", fmt_double(stability_bound));
  add("krylov_dim", std::to_string(krylov_dim));
  add("krylov_tol", fmt_double(krylov_tol));
  add("max_substeps", std::to_string(max_substeps));
  add("dim_cap", std::to_string(dim_cap));
  add("seed", std::to_string(seed));
  add("out_dir", out_dir);
  add("workers", std::to_string(workers));
  return kv;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    }

    if (key == "box_length") cfg.box_length = to_double(key, val);
    else if (key == "grid_points") cfg.grid_points = static_cast<int>(to_int(key, val));
    else if (key == "mode_window") cfg.mode_window = static_cast<int>(to_int(key, val));
    else if (key == "n_list")
      cfg.n_list = to_list<int>(key, val, [](const std::string& k, const std::string& s) {
        return static_cast<int>(to_int(k, s));
      });
    else if (key == "kappa") cfg.kappa = static_cast<int>(to_int(key, val));
    else if (key == "linear") cfg.linear = to_bool(key, val);
    else if (key == "eps") cfg.eps = to_double(key, val);
    else if (key == "eps_beta") cfg.eps_beta = to_double(key, val);
    else if (key == "eps_list")
      cfg.eps_list = to_list<double>(key, val, to_double);
    else if (key == "potential_shape") cfg.potential_shape = val;
    else if (key == "initial_profile") cfg.initial_profile = val;
    else if (key == "initial_width") cfg.initial_width = to_double(key, val);
    else if (key == "initial_center") cfg.initial_center = to_double(key, val);
    else if (key == "initial_amplitude") cfg.initial_amplitude = to_double(key, val);
    else if (key == "initial_mode") cfg.initial_mode = static_cast<int>(to_int(key, val));
    else if (key == "initial_tail_exponent") cfg.initial_tail_exponent = to_double(key, val);
    else if (key == "initial_file") cfg.initial_file = val;
    else if (key == "t_final") cfg.t_final = to_double(key, val);
    else if (key == "dt") cfg.dt = to_double(key, val);
    else if (key == "sample_every") cfg.sample_every = static_cast<int>(to_int(key, val));
    else if (key == "probe_time") cfg.probe_time = to_double(key, val);
    else if (key == "eta") cfg.eta = to_double(key, val);
    else if (key == "stability_bound") cfg.stability_bound = to_double(key, val);
    else if (key == "krylov_dim") cfg.krylov_dim = static_cast<int>(to_int(key, val));
    else if (key == "krylov_tol") cfg.krylov_tol = to_double(key, val);
    else if (key == "max_substeps") cfg.max_substeps = static_cast<int>(to_int(key, val));
    else if (key == "dim_cap") cfg.dim_cap = to_int(key, val);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, val));
    else if (key == "out_dir") cfg.out_dir = val;
    else if (key == "workers") cfg.workers = static_cast<int>(to_int(key, val));
    else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace ll
