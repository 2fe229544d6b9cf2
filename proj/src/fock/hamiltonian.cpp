#include <cmath>
#include <string>
#include <vector>

#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"

namespace mflab {

SparseOperator second_quantize(const CMatrix& a, const BasisPtr& basis) {
  const int d = basis->modes();
  if (a.rows() != d || a.cols() != d)
    throw ContractError("second_quantize: matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        ", basis has " + std::to_string(d) + " modes");
  const bool hermitian = (a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12;

  std::vector<Triplet> t;
  std::vector<int> occ(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const auto src = basis->occupation(i);
    cplx diag = 0.0;
    for (int q = 0; q < d; ++q) {
      const int nq = src[q];
      if (nq == 0) continue;
      for (int p = 0; p < d; ++p) {
        const cplx apq = a(p, q);
        if (apq == cplx(0.0)) continue;
        if (p == q) {
          diag += apq * static_cast<double>(nq);
          continue;
        }
        std::copy(src.begin(), src.end(), occ.begin());
        occ[q] -= 1;
        occ[p] += 1;
        const double f = std::sqrt(static_cast<double>(nq) * occ[p]);
        t.push_back({*basis->find(std::span<const int>(occ)), i, apq * f});
      }
    }
    if (diag != cplx(0.0)) t.push_back({i, i, diag});
  }
  return SparseOperator(basis, std::move(t), hermitian);
}

SparseOperator number_operator(const BasisPtr& basis) {
  std::vector<Triplet> t;
  t.reserve(basis->size());
  for (std::size_t i = 0; i < basis->size(); ++i)
    if (basis->total(i) != 0) t.push_back({i, i, static_cast<double>(basis->total(i))});
  return SparseOperator(basis, std::move(t), true);
}

SparseOperator build_hamiltonian(const ModeSystem& ms, int n_scale, const BasisPtr& basis) {
  if (n_scale < 1) throw ContractError("build_hamiltonian: n_scale must be >= 1");
  const int d = ms.modes();
  if (basis->modes() != d)
    throw ContractError("build_hamiltonian: basis has " + std::to_string(basis->modes()) + " modes, system has " +
                        std::to_string(d));
  auto kinetic = second_quantize(ms.one_body(), basis);
  if (!ms.interacting()) return kinetic;

  const auto& v = ms.pair();
  const double scale = 0.5 / n_scale;
  std::vector<Triplet> t = kinetic.triplets();
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const auto occ = basis->occupation(i);
    double e = 0.0;
    for (int p = 0; p < d; ++p) {
      const double np = occ[p];
      if (np == 0.0) continue;
      for (int q = 0; q < d; ++q) e += v(p, q) * np * (p == q ? np - 1.0 : static_cast<double>(occ[q]));
    }
    if (e != 0.0) t.push_back({i, i, scale * e});
  }
  return SparseOperator(basis, std::move(t), true);
}

}  // namespace mflab
