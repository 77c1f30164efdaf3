#include "ll/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace ll {

namespace detail {

// FFTW planner is not thread-safe; executing a plan on fresh buffers is.
namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

class FftEngine {
 public:
  explicit FftEngine(int n) : n_(n) {
    cvec scratch_in(n), scratch_out(n);
    auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW_ESTIMATE keeps planning deterministic and leaves buffers intact.
    fwd_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    inv_ = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }

  ~FftEngine() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }

  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  void execute(bool forward, const cvec& in, cvec& out) const {
    out.resize(n_);
    // fftw_execute_dft does not modify the input array for out-of-place plans.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(forward ? fwd_ : inv_, src, dst);
  }

 private:
  int n_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

}  // namespace detail

namespace {
bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }
}  // namespace

TorusGrid::TorusGrid(double length, int points) : length_(length), points_(points) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("TorusGrid: box length must be positive and finite");
  }
  if (points < 8 || points % 2 != 0) {
    throw ConfigError("TorusGrid: point count must be even and >= 8, got " +
                      std::to_string(points));
  }
  if (!is_power_of_two(points)) {
    throw ConfigError("TorusGrid: point count must be a power of two, got " +
                      std::to_string(points));
  }
  fft_ = std::make_shared<detail::FftEngine>(points);
}

TorusGrid make_grid(double length, int points) { return TorusGrid(length, points); }

double TorusGrid::wavenumber(int i) const {
  return 2.0 * std::numbers::pi * mode_of_index(i) / length_;
}

double TorusGrid::nyquist() const {
  return 2.0 * std::numbers::pi * (points_ / 2) / length_;
}

double TorusGrid::torus_distance(int i, int j) const {
  double d = std::abs(node(i) - node(j));
  return std::min(d, length_ - d);
}

void TorusGrid::dft_forward(const cvec& in, cvec& out) const { fft_->execute(true, in, out); }
void TorusGrid::dft_inverse(const cvec& in, cvec& out) const { fft_->execute(false, in, out); }

SpectralField::SpectralField(TorusGrid g, cvec v) : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.points()) {
    throw std::invalid_argument("SpectralField: value count does not match grid");
  }
}

double SpectralField::mass() const {
  double s = 0.0;
  for (const cplx& v : values) s += std::norm(v);
  return s * grid.spacing();
}

cvec SpectralField::to_modes() const {
  cvec out;
  grid.dft_forward(values, out);
  const double scale = std::sqrt(grid.length()) / grid.points();
  for (cplx& c : out) c *= scale;
  return out;
}

SpectralField SpectralField::from_modes(const TorusGrid& grid, const cvec& modes) {
  if (static_cast<int>(modes.size()) != grid.points()) {
    throw std::invalid_argument("from_modes: coefficient count does not match grid");
  }
  cvec out;
  grid.dft_inverse(modes, out);
  const double scale = 1.0 / std::sqrt(grid.length());
  for (cplx& v : out) v *= scale;
  return SpectralField(grid, std::move(out));
}

SpectralField SpectralField::normalized() const {
  const double m = mass();
  if (!(m > 0.0)) throw NumericError("normalized: field has zero mass");
  const double s = 1.0 / std::sqrt(m);
  cvec v = values;
  for (cplx& x : v) x *= s;
  return SpectralField(grid, std::move(v));
}

cplx inner(const SpectralField& f, const SpectralField& g) {
  if (!f.grid.same_as(g.grid)) throw std::invalid_argument("inner: grids differ");
  cplx s = 0.0;
  for (std::size_t j = 0; j < f.values.size(); ++j) s += std::conj(f.values[j]) * g.values[j];
  return s * f.grid.spacing();
}

SpectralField lp_project(const SpectralField& phi, double cutoff) {
  if (cutoff < 0.0) throw std::invalid_argument("lp_project: cutoff must be >= 0");
  cvec c = phi.to_modes();
  for (int i = 0; i < phi.grid.points(); ++i) {
    if (std::abs(phi.grid.wavenumber(i)) > cutoff) c[i] = 0.0;
  }
  return SpectralField::from_modes(phi.grid, c);
}

double lp_tail_norm(const SpectralField& phi, double cutoff) {
  const cvec c = phi.to_modes();
  double s = 0.0;
  for (int i = 0; i < phi.grid.points(); ++i) {
    if (std::abs(phi.grid.wavenumber(i)) > cutoff) s += std::norm(c[i]);
  }
  return std::sqrt(s);
}

double sobolev_norm(const SpectralField& phi, double s) {
  const cvec c = phi.to_modes();
  double acc = 0.0;
  for (int i = 0; i < phi.grid.points(); ++i) {
    const double k = phi.grid.wavenumber(i);
    acc += std::pow(1.0 + k * k, s) * std::norm(c[i]);
  }
  return std::sqrt(acc);
}

double sup_norm(const SpectralField& phi) {
  double m = 0.0;
  for (const cplx& v : phi.values) m = std::max(m, std::abs(v));
  return m;
}

double lq_norm(const SpectralField& phi, double q) {
  if (std::isinf(q)) return sup_norm(phi);
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be >= 1");
  double s = 0.0;
  for (const cplx& v : phi.values) s += std::pow(std::abs(v), q);
  return std::pow(s * phi.grid.spacing(), 1.0 / q);
}

double hoelder_half_seminorm(const SpectralField& phi) {
  const int m = phi.grid.points();
  double best = 0.0;
  // By translation invariance of the node set it is enough to scan offsets.
  for (int d = 1; d <= m / 2; ++d) {
    const double dist = std::sqrt(phi.grid.torus_distance(0, d));
    for (int j = 0; j < m; ++j) {
      const double num = std::abs(phi.values[(j + d) % m] - phi.values[j]);
      best = std::max(best, num / dist);
    }
  }
  return best;
}

}  // namespace ll
