#include "ll/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ll {

ModeBasis::ModeBasis(TorusGrid grid, int num_modes) : grid_(std::move(grid)), num_modes_(num_modes) {
  if (num_modes < 2 || num_modes % 2 != 0) {
    throw ConfigError("ModeBasis: mode count must be even and >= 2");
  }
  if (num_modes > grid_.points()) {
    throw ConfigError("ModeBasis: mode count exceeds grid resolution");
  }
}

double ModeBasis::wavenumber(int p) const {
  return 2.0 * std::numbers::pi * mode_integer(p) / grid_.length();
}

SpectralField ModeBasis::mode_field(int p) const {
  cvec modes(grid_.points(), cplx(0.0));
  modes[grid_.index_of_mode(mode_integer(p))] = 1.0;
  return SpectralField::from_modes(grid_, modes);
}

Vector ModeBasis::window(const SpectralField& phi) const {
  if (!phi.grid.same_as(grid_)) throw std::invalid_argument("window: field on a different grid");
  const cvec c = phi.to_modes();
  Vector out(num_modes_);
  for (int p = 0; p < num_modes_; ++p) out(p) = c[grid_.index_of_mode(mode_integer(p))];
  return out;
}

Vector ModeBasis::window_normalized(const SpectralField& phi) const {
  Vector c = window(phi);
  const double n = c.norm();
  if (!(n > 1e-14)) {
    throw NumericError("window_normalized: field has no mass inside the mode window");
  }
  return c / n;
}

SpectralField ModeBasis::unwindow(const Vector& coeffs) const {
  if (coeffs.size() != num_modes_) throw std::invalid_argument("unwindow: wrong coefficient count");
  cvec modes(grid_.points(), cplx(0.0));
  for (int p = 0; p < num_modes_; ++p) modes[grid_.index_of_mode(mode_integer(p))] = coeffs(p);
  return SpectralField::from_modes(grid_, modes);
}

namespace {

std::vector<std::vector<long long>> pascal_table(int rows) {
  std::vector<std::vector<long long>> t(rows + 1);
  for (int i = 0; i <= rows; ++i) {
    t[i].resize(i + 1);
    t[i][0] = t[i][i] = 1;
    for (int j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
  }
  return t;
}

long long binom_ll(const std::vector<std::vector<long long>>& t, int n, int k) {
  if (k < 0 || k > n) return 0;
  return t[n][k];
}

void enumerate_rec(int remaining, int slot, std::vector<int>& occ,
                   std::vector<std::vector<int>>& out) {
  const int slots = static_cast<int>(occ.size());
  if (slot == slots - 1) {
    occ[slot] = remaining;
    out.push_back(occ);
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    occ[slot] = n;
    enumerate_rec(remaining - n, slot + 1, occ, out);
  }
}

}  // namespace

long long fock_dimension(int particles, int num_modes) {
  const int n = particles + num_modes - 1;
  const int k = num_modes - 1;
  long long acc = 1;
  for (int i = 1; i <= k; ++i) {
    if (acc > (1ll << 56)) return 1ll << 62;  // saturate before overflow; still above any cap
    acc = acc * (n - k + i) / i;  // exact: partial products are binomials
  }
  return acc;
}

FockBasis enumerate_basis(int particles, const ModeBasis& modes, long long dim_cap) {
  if (particles < 1) throw ConfigError("enumerate_basis: particle count must be >= 1");
  const long long dim = fock_dimension(particles, modes.size());
  if (dim > dim_cap) {
    std::ostringstream msg;
    msg << "enumerate_basis: dimension " << dim << " exceeds the cap " << dim_cap
        << " (N = " << particles << ", K = " << modes.size() << ")";
    throw ConfigError(msg.str());
  }
  auto impl = std::make_shared<FockBasis::Impl>(FockBasis::Impl{
      particles, modes, {}, pascal_table(particles + modes.size())});
  impl->occupations.reserve(dim);
  std::vector<int> occ(modes.size(), 0);
  enumerate_rec(particles, 0, occ, impl->occupations);
  FockBasis basis;
  basis.impl_ = std::move(impl);
  return basis;
}

long long FockBasis::index_of(const std::vector<int>& occ) const {
  const auto& impl = *impl_;
  const int k = impl.modes.size();
  if (static_cast<int>(occ.size()) != k) {
    throw std::invalid_argument("index_of: wrong occupation length");
  }
  // Counting rank: states preceding `occ` put a larger count in the first
  // slot that differs; binomial(r + s - 1, s - 1) states distribute r
  // particles over s slots.
  long long rank = 0;
  int remaining = impl.particles;
  for (int slot = 0; slot < k - 1; ++slot) {
    const int n = occ[slot];
    if (n < 0 || n > remaining) throw std::invalid_argument("index_of: invalid occupation");
    const int slots_after = k - slot - 1;
    for (int v = remaining; v > n; --v) {
      rank += binom_ll(impl.binom, (remaining - v) + slots_after - 1, slots_after - 1);
    }
    remaining -= n;
  }
  if (occ[k - 1] != remaining) throw std::invalid_argument("index_of: occupation sum mismatch");
  return rank;
}

FockVector::FockVector(FockBasis b, Vector a) : basis(std::move(b)), amps(std::move(a)) {
  if (amps.size() != basis.dim()) {
    throw std::invalid_argument("FockVector: amplitude count does not match basis dimension");
  }
}

FockVector FockVector::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw NumericError("FockVector::normalized: zero vector");
  return FockVector(basis, amps / n);
}

PotentialShape potential_shape_from_name(const std::string& name) {
  if (name == "gaussian") return PotentialShape::Gaussian;
  if (name == "tophat" || name == "top-hat") return PotentialShape::TopHat;
  if (name == "sech2" || name == "sech-squared") return PotentialShape::SechSquared;
  throw ConfigError("unknown potential shape '" + name + "'");
}

std::string potential_shape_name(PotentialShape shape) {
  switch (shape) {
    case PotentialShape::Gaussian: return "gaussian";
    case PotentialShape::TopHat: return "tophat";
    case PotentialShape::SechSquared: return "sech2";
  }
  return "?";
}

double potential_vhat(PotentialShape shape, double q) {
  switch (shape) {
    case PotentialShape::Gaussian:
      // V(x) = e^{-x^2/2}/sqrt(2 pi)
      return std::exp(-0.5 * q * q);
    case PotentialShape::TopHat: {
      // V(x) = 1/2 on |x| <= 1
      if (q == 0.0) return 1.0;
      return std::sin(q) / q;
    }
    case PotentialShape::SechSquared: {
      // V(x) = sech^2(x)/2
      if (q == 0.0) return 1.0;
      const double a = 0.5 * std::numbers::pi * q;
      return a / std::sinh(a);
    }
  }
  return 0.0;
}

TwoBodyKernel::TwoBodyKernel(PotentialShape shape, double eps, const ModeBasis& modes)
    : shape_(shape), eps_(eps), modes_(modes) {
  if (!(eps > 0.0)) throw ConfigError("TwoBodyKernel: eps must be positive");
  const double h = modes.grid().spacing();
  if (eps < 2.0 * h) {
    std::ostringstream msg;
    msg << "TwoBodyKernel: eps = " << eps << " is below two grid spacings (" << 2.0 * h
        << "); the regularized potential is not resolvable";
    throw ConfigError(msg.str());
  }
  const int k = modes.size();
  coeffs_.resize(2 * k - 1);
  const double dk = 2.0 * std::numbers::pi / modes.grid().length();
  for (int d = -(k - 1); d <= k - 1; ++d) {
    coeffs_[d + (k - 1)] = potential_vhat(shape, eps * dk * d);
  }
}

double TwoBodyKernel::vhat(int d) const {
  const int k = modes_.size();
  if (d < -(k - 1) || d > k - 1) throw std::out_of_range("TwoBodyKernel::vhat");
  return coeffs_[d + (k - 1)];
}

TwoBodyKernel potential_coefficients(PotentialShape shape, double eps, const ModeBasis& modes) {
  return TwoBodyKernel(shape, eps, modes);
}

SparseHermitian build_kinetic(const FockBasis& basis) {
  const int k = basis.modes().size();
  const long long dim = basis.dim();
  SparseHermitian h(dim, dim);
  h.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (long long i = 0; i < dim; ++i) {
    const std::vector<int>& occ = basis.occupation(i);
    double e = 0.0;
    for (int p = 0; p < k; ++p) {
      const double kp = basis.modes().wavenumber(p);
      e += kp * kp * occ[p];
    }
    h.insert(i, i) = e;
  }
  h.makeCompressed();
  return h;
}

SparseHermitian build_hamiltonian(const FockBasis& basis, const TwoBodyKernel& kernel, int kappa) {
  if (!kernel.modes().same_as(basis.modes())) {
    throw std::invalid_argument("build_hamiltonian: kernel and basis use different mode windows");
  }
  if (kappa == 0) return build_kinetic(basis);

  const int k = basis.modes().size();
  const long long dim = basis.dim();
  const double g = kappa / (2.0 * basis.particles() * basis.modes().grid().length());

  std::vector<Eigen::Triplet<cplx>> trip;
  std::vector<int> occ;
  for (long long col = 0; col < dim; ++col) {
    occ = basis.occupation(col);

    double diag = 0.0;
    for (int p = 0; p < k; ++p) {
      const double kp = basis.modes().wavenumber(p);
      diag += kp * kp * occ[p];
    }

    // a_q a_p annihilation pairs, then all momentum transfers d with both
    // creation indices inside the window.
    for (int p = 0; p < k; ++p) {
      if (occ[p] == 0) continue;
      for (int q = 0; q < k; ++q) {
        if (occ[q] == 0 || (q == p && occ[p] < 2)) continue;
        const double ann = std::sqrt(double(occ[p]) * (p == q ? occ[p] - 1 : occ[q]));
        occ[p] -= 1;
        occ[q] -= 1;
        const int d_lo = -p, d_hi = (k - 1) - p;
        for (int d = std::max(d_lo, q - (k - 1)); d <= std::min(d_hi, q); ++d) {
          const int a = p + d;     // adag_{p+d}
          const int b = q - d;     // adag_{q-d}
          occ[b] += 1;
          const double f1 = std::sqrt(double(occ[b]));
          occ[a] += 1;
          const double f2 = std::sqrt(double(occ[a]));
          const double amp = g * kernel.vhat(d) * ann * f1 * f2;
          if (amp != 0.0) trip.emplace_back(basis.index_of(occ), col, cplx(amp));
          occ[a] -= 1;
          occ[b] -= 1;
        }
        occ[p] += 1;
        occ[q] += 1;
      }
    }
    if (diag != 0.0) trip.emplace_back(col, col, cplx(diag));
  }

  SparseHermitian h(dim, dim);
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return h;
}

FockVector product_state(const SpectralField& phi, const FockBasis& basis) {
  const Vector c = basis.modes().window_normalized(phi);
  const int k = basis.modes().size();
  const int n = basis.particles();
  // log-factorial table keeps the combinatorial weight stable for large N
  std::vector<double> lfact(n + 1, 0.0);
  for (int i = 2; i <= n; ++i) lfact[i] = lfact[i - 1] + std::log(double(i));

  Vector amps(basis.dim());
  for (long long i = 0; i < basis.dim(); ++i) {
    const std::vector<int>& occ = basis.occupation(i);
    double logw = lfact[n];
    cplx mono = 1.0;
    for (int p = 0; p < k; ++p) {
      logw -= lfact[occ[p]];
      for (int r = 0; r < occ[p]; ++r) mono *= c(p);
    }
    amps(i) = std::exp(0.5 * logw) * mono;
  }
  return FockVector(basis, std::move(amps));
}

Vector apply_one_body(const Matrix& one_body, const FockBasis& basis, const Vector& v) {
  const int k = basis.modes().size();
  if (one_body.rows() != k || one_body.cols() != k) {
    throw std::invalid_argument("apply_one_body: matrix does not match the mode window");
  }
  Vector out = Vector::Zero(basis.dim());
  std::vector<int> occ;
  for (long long col = 0; col < basis.dim(); ++col) {
    const cplx amp = v(col);
    if (amp == 0.0) continue;
    occ = basis.occupation(col);
    for (int q = 0; q < k; ++q) {
      if (occ[q] == 0) continue;
      const double fq = std::sqrt(double(occ[q]));
      occ[q] -= 1;
      for (int p = 0; p < k; ++p) {
        const cplx a = one_body(p, q);
        if (a == 0.0) continue;
        occ[p] += 1;
        const double fp = std::sqrt(double(occ[p]));
        out(basis.index_of(occ)) += a * fq * fp * amp;
        occ[p] -= 1;
      }
      occ[q] += 1;
    }
  }
  return out;
}

SparseHermitian second_quantize_one_body(const Matrix& one_body, const FockBasis& basis) {
  const int k = basis.modes().size();
  if (one_body.rows() != k || one_body.cols() != k) {
    throw std::invalid_argument("second_quantize_one_body: matrix does not match the mode window");
  }
  std::vector<Eigen::Triplet<cplx>> trip;
  std::vector<int> occ;
  for (long long col = 0; col < basis.dim(); ++col) {
    occ = basis.occupation(col);
    for (int q = 0; q < k; ++q) {
      if (occ[q] == 0) continue;
      const double fq = std::sqrt(double(occ[q]));
      occ[q] -= 1;
      for (int p = 0; p < k; ++p) {
        const cplx a = one_body(p, q);
        if (a == 0.0) continue;
        occ[p] += 1;
        const double fp = std::sqrt(double(occ[p]));
        trip.emplace_back(basis.index_of(occ), col, a * fq * fp);
        occ[p] -= 1;
      }
      occ[q] += 1;
    }
  }
  SparseHermitian m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

SparseHermitian number_operator(const SpectralField& phi, const FockBasis& basis) {
  const Vector c = basis.modes().window_normalized(phi);
  return second_quantize_one_body(c * c.adjoint(), basis);
}

SparseHermitian total_momentum(const FockBasis& basis) {
  const long long dim = basis.dim();
  SparseHermitian m(dim, dim);
  m.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (long long i = 0; i < dim; ++i) {
    const std::vector<int>& occ = basis.occupation(i);
    double p_tot = 0.0;
    for (int p = 0; p < basis.modes().size(); ++p) p_tot += occ[p] * basis.modes().mode_integer(p);
    m.insert(i, i) = p_tot;
  }
  m.makeCompressed();
  return m;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot files are little-endian; big-endian hosts are unsupported");

constexpr char kSnapshotMagic[8] = {'L', 'L', 'F', 'O', 'C', 'K', '0', '1'};
constexpr char kOrderingTag[8] = {'l', 'e', 'x', 'd', 'e', 's', 'c', 0};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError("fock snapshot: truncated file");
  return v;
}

}  // namespace

void save_fock_vector(std::ostream& out, const FockVector& v) {
  out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(v.basis.particles()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(v.basis.modes().size()));
  put<double>(out, v.basis.modes().grid().length());
  out.write(kOrderingTag, sizeof(kOrderingTag));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(v.basis.dim()));
  for (long long i = 0; i < v.basis.dim(); ++i) {
    put<double>(out, v.amps(i).real());
    put<double>(out, v.amps(i).imag());
  }
  if (!out) throw ConfigError("fock snapshot: write failed");
}

FockVector load_fock_vector(std::istream& in, const TorusGrid& grid, long long dim_cap) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0) {
    throw ConfigError("fock snapshot: bad magic");
  }
  const auto n = get<std::uint32_t>(in);
  const auto k = get<std::uint32_t>(in);
  const double length = get<double>(in);
  char tag[8];
  in.read(tag, sizeof(tag));
  if (!in || std::memcmp(tag, kOrderingTag, sizeof(tag)) != 0) {
    throw ConfigError("fock snapshot: unknown ordering tag");
  }
  if (std::abs(length - grid.length()) > 1e-12 * std::max(1.0, grid.length())) {
    throw ConfigError("fock snapshot: box length does not match the configured grid");
  }
  FockBasis basis = enumerate_basis(static_cast<int>(n),
                                    ModeBasis(grid, static_cast<int>(k)), dim_cap);
  const auto dim = get<std::uint64_t>(in);
  if (dim != static_cast<std::uint64_t>(basis.dim())) {
    throw ConfigError("fock snapshot: dimension mismatch");
  }
  Vector amps(basis.dim());
  for (long long i = 0; i < basis.dim(); ++i) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    amps(i) = cplx(re, im);
  }
  return FockVector(std::move(basis), std::move(amps));
}

}  // namespace ll
