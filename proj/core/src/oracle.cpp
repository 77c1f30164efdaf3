#include "ll/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ll {
namespace oracle {

namespace {

long long ipow(int base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<int> decode(long long idx, int particles, int k) {
  std::vector<int> t(particles);
  for (int j = particles - 1; j >= 0; --j) {
    t[j] = static_cast<int>(idx % k);
    idx /= k;
  }
  return t;
}

long long encode(const std::vector<int>& t, int k) {
  long long idx = 0;
  for (int v : t) idx = idx * k + v;
  return idx;
}

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Matrix projector_matrix(const ModeBasis& modes, const SpectralField& phi) {
  const Vector c = modes.window_normalized(phi);
  return c * c.adjoint();
}

}  // namespace

TensorState::TensorState(int n, ModeBasis m, Vector a)
    : particles(n), modes(std::move(m)), amps(std::move(a)) {
  if (amps.size() != ipow(modes.size(), particles)) {
    throw std::invalid_argument("TensorState: amplitude count is not K^N");
  }
}

void check_size_guard(int particles, int num_modes) {
  if (particles > 3 || num_modes > 6) {
    std::ostringstream msg;
    msg << "oracle: size guard violated (N = " << particles << " > 3 or K = " << num_modes
        << " > 6)";
    throw std::invalid_argument(msg.str());
  }
}

TensorState symmetrize(const TensorState& psi) {
  const int n = psi.particles;
  if (factorial(n) > 720.5) throw std::invalid_argument("symmetrize: N! exceeds 720");
  const int k = psi.modes.size();
  const auto perms = all_permutations(n);
  Vector out = Vector::Zero(psi.dim());
  std::vector<int> permuted(n);
  for (long long idx = 0; idx < psi.dim(); ++idx) {
    const std::vector<int> t = decode(idx, n, k);
    cplx acc = 0.0;
    for (const auto& p : perms) {
      for (int j = 0; j < n; ++j) permuted[j] = t[p[j]];
      acc += psi.amps(encode(permuted, k));
    }
    out(idx) = acc / double(perms.size());
  }
  return TensorState(n, psi.modes, std::move(out));
}

double asymmetry(const TensorState& psi) {
  const TensorState sym = symmetrize(psi);
  return (psi.amps - sym.amps).cwiseAbs().maxCoeff();
}

TensorState apply_one_body_at(const TensorState& psi, const Matrix& b, int j) {
  const int n = psi.particles;
  const int k = psi.modes.size();
  if (j < 1 || j > n) throw std::invalid_argument("apply_one_body_at: slot out of range");
  if (b.rows() != k || b.cols() != k) {
    throw std::invalid_argument("apply_one_body_at: operator does not match the window");
  }
  const long long stride = ipow(k, n - j);
  const long long block = stride * k;
  Vector out(psi.dim());
  for (long long seg = 0; seg < psi.dim(); seg += block) {
    for (long long inner = 0; inner < stride; ++inner) {
      const long long base = seg + inner;
      for (int a = 0; a < k; ++a) {
        cplx acc = 0.0;
        for (int bb = 0; bb < k; ++bb) acc += b(a, bb) * psi.amps(base + bb * stride);
        out(base + a * stride) = acc;
      }
    }
  }
  return TensorState(n, psi.modes, std::move(out));
}

TensorState apply_pj(const TensorState& psi, const SpectralField& phi, int j) {
  check_size_guard(psi.particles, psi.modes.size());
  return apply_one_body_at(psi, projector_matrix(psi.modes, phi), j);
}

TensorState apply_qj(const TensorState& psi, const SpectralField& phi, int j) {
  check_size_guard(psi.particles, psi.modes.size());
  const int k = psi.modes.size();
  const Matrix q = Matrix::Identity(k, k) - projector_matrix(psi.modes, phi);
  return apply_one_body_at(psi, q, j);
}

TensorState apply_Pk(const TensorState& psi, const SpectralField& phi, int k_bad) {
  check_size_guard(psi.particles, psi.modes.size());
  const int n = psi.particles;
  if (k_bad < 0 || k_bad > n) {
    return TensorState(n, psi.modes, Vector::Zero(psi.dim()));
  }
  const int k = psi.modes.size();
  const Matrix p = projector_matrix(psi.modes, phi);
  const Matrix q = Matrix::Identity(k, k) - p;

  Vector acc = Vector::Zero(psi.dim());
  // every alpha in {0,1}^N with |alpha| = k_bad, exactly as printed
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k_bad) continue;
    TensorState term = psi;
    for (int j = 1; j <= n; ++j) {
      term = apply_one_body_at(term, (mask >> (j - 1)) & 1u ? q : p, j);
    }
    acc += term.amps;
  }
  return TensorState(n, psi.modes, std::move(acc));
}

TensorState apply_hat(const TensorState& psi, const SpectralField& phi,
                      const std::function<double(long long)>& f) {
  Vector acc = Vector::Zero(psi.dim());
  for (int k = 0; k <= psi.particles; ++k) {
    const double w = f(k);
    if (w == 0.0) continue;
    acc += w * apply_Pk(psi, phi, k).amps;
  }
  return TensorState(psi.particles, psi.modes, std::move(acc));
}

FockVector firstq_to_fock(const TensorState& psi, const FockBasis& basis) {
  if (!basis.modes().same_as(psi.modes) || basis.particles() != psi.particles) {
    throw std::invalid_argument("firstq_to_fock: basis mismatch");
  }
  const double asym = asymmetry(psi);
  if (asym > 1e-10 * std::max(1.0, psi.norm())) {
    std::ostringstream msg;
    msg << "firstq_to_fock: input is not permutation symmetric (asymmetry " << asym << ")";
    throw std::invalid_argument(msg.str());
  }
  const int n = psi.particles;
  const int k = psi.modes.size();
  Vector amps = Vector::Zero(basis.dim());
  std::vector<int> occ(k);
  for (long long idx = 0; idx < psi.dim(); ++idx) {
    const std::vector<int> t = decode(idx, n, k);
    std::fill(occ.begin(), occ.end(), 0);
    for (int v : t) occ[v] += 1;
    double count = factorial(n);
    for (int v : occ) count /= factorial(v);
    amps(basis.index_of(occ)) += psi.amps(idx) / std::sqrt(count);
  }
  return FockVector(basis, std::move(amps));
}

TensorState fock_to_firstq(const FockVector& v) {
  const int n = v.basis.particles();
  const int k = v.basis.modes().size();
  Vector amps(ipow(k, n));
  std::vector<int> occ(k);
  for (long long idx = 0; idx < amps.size(); ++idx) {
    const std::vector<int> t = decode(idx, n, k);
    std::fill(occ.begin(), occ.end(), 0);
    for (int val : t) occ[val] += 1;
    double count = factorial(n);
    for (int val : occ) count /= factorial(val);
    amps(idx) = v.amps(v.basis.index_of(occ)) / std::sqrt(count);
  }
  return TensorState(n, v.basis.modes(), std::move(amps));
}

Matrix brute_hamiltonian(int particles, const ModeBasis& modes, const TwoBodyKernel& kernel,
                         int kappa) {
  const int k = modes.size();
  const long long dim = ipow(k, particles);
  if (dim > 10'000) throw std::invalid_argument("brute_hamiltonian: K^N exceeds 10^4");
  if (!kernel.modes().same_as(modes)) {
    throw std::invalid_argument("brute_hamiltonian: kernel window mismatch");
  }

  Matrix h = Matrix::Zero(dim, dim);
  const double inv_l = 1.0 / modes.grid().length();

  for (long long col = 0; col < dim; ++col) {
    const std::vector<int> t = decode(col, particles, k);
    double kin = 0.0;
    for (int v : t) {
      const double kv = modes.wavenumber(v);
      kin += kv * kv;
    }
    h(col, col) += kin;

    if (kappa == 0) continue;
    for (int i = 0; i < particles; ++i) {
      for (int j = i + 1; j < particles; ++j) {
        const int c = t[i], d = t[j];
        // replace (c, d) by (a, b) with a + b = c + d inside the window
        for (int a = 0; a < k; ++a) {
          const int b = c + d - a;
          if (b < 0 || b >= k) continue;
          std::vector<int> s = t;
          s[i] = a;
          s[j] = b;
          h(encode(s, k), col) += (double(kappa) / particles) * inv_l * kernel.vhat(a - c);
        }
      }
    }
  }
  return h;
}

Matrix rdm1(const TensorState& psi) {
  const int n = psi.particles;
  const int k = psi.modes.size();
  const long long rest = ipow(k, n - 1);
  Matrix g = Matrix::Zero(k, k);
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q) {
      cplx acc = 0.0;
      for (long long r = 0; r < rest; ++r) {
        acc += psi.amps(p * rest + r) * std::conj(psi.amps(q * rest + r));
      }
      g(p, q) = acc;
    }
  }
  return g;
}

Matrix rdm2_pair_basis(const TensorState& psi) {
  const int n = psi.particles;
  if (n < 2) throw std::invalid_argument("oracle rdm2: needs N >= 2");
  const int k = psi.modes.size();
  const long long rest = ipow(k, n - 2);

  auto pair_index = [k](int a, int b) { return a * k - a * (a - 1) / 2 + (b - a); };
  auto weight = [](int a, int b) { return a == b ? 1.0 : std::sqrt(2.0); };

  const int pd = k * (k + 1) / 2;
  Matrix g = Matrix::Zero(pd, pd);
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      for (int c = 0; c < k; ++c) {
        for (int d = c; d < k; ++d) {
          cplx acc = 0.0;
          for (long long r = 0; r < rest; ++r) {
            acc += psi.amps((a * k + b) * rest + r) * std::conj(psi.amps((c * k + d) * rest + r));
          }
          g(pair_index(a, b), pair_index(c, d)) = weight(a, b) * weight(c, d) * acc;
        }
      }
    }
  }
  return g;
}

std::vector<double> pk_weights(const TensorState& psi, const SpectralField& phi) {
  std::vector<double> w(psi.particles + 1);
  for (int k = 0; k <= psi.particles; ++k) {
    w[k] = std::real(psi.amps.dot(apply_Pk(psi, phi, k).amps));
  }
  return w;
}

double alpha(const TensorState& psi, const SpectralField& phi) {
  const auto w = pk_weights(psi, phi);
  double s = 0.0;
  for (int k = 0; k <= psi.particles; ++k) s += (double(k) / psi.particles) * w[k];
  return s;
}

double beta(const TensorState& psi, const SpectralField& phi) {
  const auto w = pk_weights(psi, phi);
  double s = 0.0;
  for (int k = 0; k <= psi.particles; ++k) s += std::sqrt(double(k) / psi.particles) * w[k];
  return s;
}

double energy_per_particle(const TensorState& psi, const Matrix& hamiltonian) {
  return std::real(psi.amps.dot(hamiltonian * psi.amps)) / psi.particles;
}

TensorState random_symmetric_state(int particles, const ModeBasis& modes, Rng& rng) {
  const long long dim = ipow(modes.size(), particles);
  Vector amps(dim);
  for (long long i = 0; i < dim; ++i) amps(i) = rng.cnormal();
  TensorState sym = symmetrize(TensorState(particles, modes, std::move(amps)));
  const double nrm = sym.norm();
  if (!(nrm > 0.0)) throw NumericError("random_symmetric_state: degenerate draw");
  sym.amps /= nrm;
  return sym;
}

}  // namespace oracle
}  // namespace ll
