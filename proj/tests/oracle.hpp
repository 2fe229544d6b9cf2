#pragma once

// Brute-force references for the tests: explicit d^n wavefunction tensors and
// dense matrix exponentials. Only usable at tiny sizes.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mflab/fock_ops.hpp"
#include "mflab/fock_vector.hpp"

namespace oracle {

using mflab::cplx;
using mflab::CMatrix;
using mflab::CVector;

// Wavefunction psi(x_1..x_n) on {0..d-1}^n, row-major with x_1 slowest.
struct Tensor {
  int d = 0;
  int n = 0;
  std::vector<cplx> data;

  std::size_t flat(const std::vector<int>& xs) const {
    std::size_t i = 0;
    for (int x : xs) i = i * static_cast<std::size_t>(d) + static_cast<std::size_t>(x);
    return i;
  }
  std::vector<int> unflat(std::size_t i) const {
    std::vector<int> xs(static_cast<std::size_t>(n));
    for (int k = n - 1; k >= 0; --k) {
      xs[static_cast<std::size_t>(k)] = static_cast<int>(i % static_cast<std::size_t>(d));
      i /= static_cast<std::size_t>(d);
    }
    return xs;
  }
};

inline std::size_t ipow(int d, int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= static_cast<std::size_t>(d);
  return r;
}

inline double log_fact(int k) { return std::lgamma(k + 1.0); }

// |N> has tensor entries sqrt(prod N_p! / n!) on each arrangement.
inline Tensor to_tensor(const mflab::FockVector& v, int n) {
  const auto& b = v.basis();
  Tensor t{b.modes(), n, std::vector<cplx>(ipow(b.modes(), n), 0.0)};
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    const auto xs = t.unflat(i);
    std::vector<int> occ(static_cast<std::size_t>(t.d), 0);
    for (int x : xs) occ[static_cast<std::size_t>(x)]++;
    const auto j = b.find(std::span<const int>(occ));
    if (!j) continue;
    double lw = -log_fact(n);
    for (int o : occ) lw += log_fact(o);
    t.data[i] = std::exp(0.5 * lw) * v[*j];
  }
  return t;
}

// Occupation coefficients of a symmetric tensor: <N|T> = sqrt(n!/prod N_p!) T[arrangement].
inline mflab::FockVector from_tensor(const Tensor& t, const mflab::BasisPtr& basis) {
  mflab::FockVector v(basis);
  const int n = t.n;
  const auto off = basis->sector_offset(n);
  for (std::size_t i = off; i < off + basis->sector_size(n); ++i) {
    const auto occ = basis->occupation(i);
    std::vector<int> xs;
    double lw = log_fact(n);
    for (int p = 0; p < t.d; ++p) {
      for (int r = 0; r < occ[p]; ++r) xs.push_back(p);
      lw -= log_fact(occ[p]);
    }
    v[i] = std::exp(0.5 * lw) * t.data[t.flat(xs)];
  }
  return v;
}

// (a_p psi)(x_2..x_n) = sqrt(n) psi(p, x_2..x_n)
inline Tensor annihilate(const Tensor& t, int p) {
  Tensor out{t.d, t.n - 1, std::vector<cplx>(ipow(t.d, t.n - 1), 0.0)};
  const std::size_t stride = out.data.size();
  for (std::size_t i = 0; i < stride; ++i) out.data[i] = std::sqrt(static_cast<double>(t.n)) * t.data[p * stride + i];
  return out;
}

inline Tensor tensor_product(const Tensor& a, const Tensor& b) {
  Tensor out{a.d, a.n + b.n, std::vector<cplx>(a.data.size() * b.data.size())};
  for (std::size_t i = 0; i < a.data.size(); ++i)
    for (std::size_t j = 0; j < b.data.size(); ++j) out.data[i * b.data.size() + j] = a.data[i] * b.data[j];
  return out;
}

inline Tensor one_particle(const CVector& phi) {
  Tensor t{static_cast<int>(phi.size()), 1, std::vector<cplx>(phi.data(), phi.data() + phi.size())};
  return t;
}

// Average over all n! permutations of the arguments.
inline Tensor symmetrize(const Tensor& t) {
  std::vector<int> perm(static_cast<std::size_t>(t.n));
  for (int i = 0; i < t.n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Tensor out{t.d, t.n, std::vector<cplx>(t.data.size(), 0.0)};
  double count = 0;
  do {
    count += 1;
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      const auto xs = t.unflat(i);
      std::vector<int> ys(xs.size());
      for (std::size_t k = 0; k < xs.size(); ++k) ys[k] = xs[static_cast<std::size_t>(perm[k])];
      out.data[i] += t.data[t.flat(ys)];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (auto& z : out.data) z /= count;
  return out;
}

inline double tensor_norm(const Tensor& t) {
  double s = 0;
  for (auto z : t.data) s += std::norm(z);
  return std::sqrt(s);
}

// exp(a*(alpha) - a(conj alpha)) by diagonalizing the Hermitian generator on
// a (larger) truncated basis.
inline CMatrix weyl_dense(const CVector& alpha, const mflab::BasisPtr& basis) {
  std::vector<cplx> a(alpha.data(), alpha.data() + alpha.size());
  std::vector<cplx> ac(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) ac[i] = std::conj(a[i]);
  const CMatrix g = mflab::field_matrix(mflab::Ladder::create, a, basis).to_dense() -
                    mflab::field_matrix(mflab::Ladder::annihilate, ac, basis).to_dense();
  const CMatrix herm = cplx(0, 1) * g;  // i G is Hermitian
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  CVector ph(eig.eigenvalues().size());
  for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::polar(1.0, -eig.eigenvalues()[i]);
  return eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
}

inline CVector random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(d);
  for (auto& z : v) z = cplx(g(rng), g(rng));
  return v.normalized();
}

inline mflab::FockVector random_state(const mflab::BasisPtr& b, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  mflab::FockVector v(b);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(g(rng), g(rng));
  return v.normalized();
}

// Random state supported strictly below the cutoff (sectors <= top).
inline mflab::FockVector random_state_below(const mflab::BasisPtr& b, int top, std::mt19937_64& rng) {
  auto v = random_state(b, rng);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (b->total(i) > top) v[i] = 0.0;
  return v.normalized();
}

}  // namespace oracle
