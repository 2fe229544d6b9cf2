#include <cmath>
#include <string>
#include <vector>

#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"

namespace mflab {

double bosonic_coefficient(int occupation) { return std::sqrt(static_cast<double>(occupation)); }

namespace {

void check_mode(int mode, const FockBasis& b) {
  if (mode < 0 || mode >= b.modes())
    throw ContractError("mode index " + std::to_string(mode) + " out of range for " + std::to_string(b.modes()) +
                        " modes");
}

// Calls emit(col, row, factor) for every nonzero matrix element of a^#_mode
// between `in` (columns) and `out` (rows).
template <class Emit>
void for_each_hop(Ladder kind, int mode, const FockBasis& in, const FockBasis& out, LadderCoefficient coefficient,
                  Emit&& emit) {
  std::vector<int> occ(static_cast<std::size_t>(in.modes()));
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto src = in.occupation(i);
    const int here = src[mode];
    if (kind == Ladder::annihilate && here == 0) continue;
    if (kind == Ladder::create && !out.has_sector(in.total(i) + 1)) continue;
    std::copy(src.begin(), src.end(), occ.begin());
    double factor = 0.0;
    if (kind == Ladder::annihilate) {
      factor = coefficient(here);
      occ[mode] -= 1;
    } else {
      factor = coefficient(here + 1);
      occ[mode] += 1;
    }
    const auto j = out.find(std::span<const int>(occ));
    if (j) emit(i, *j, factor);
  }
}

void check_target(Ladder kind, const FockBasis& in, const FockBasis& target) {
  const auto expected = ladder_target(kind, in);
  if (!same_basis(*expected, target))
    throw ContractError("ladder: output basis " + target.sector().to_string() + " does not match " +
                        expected->sector().to_string());
}

}  // namespace

BasisPtr ladder_target(Ladder kind, const FockBasis& in) {
  if (in.is_truncated()) return shared_basis(in.modes(), in.sector());
  const int n = in.sector().n + (kind == Ladder::create ? 1 : -1);
  if (n < 0) throw ContractError("ladder: annihilation on the zero-particle sector has no target sector");
  return shared_basis(in.modes(), Sector::fixed(n));
}

FockVector ladder_apply(Ladder kind, int mode, const FockVector& v) {
  return ladder_apply(kind, mode, v, ladder_target(kind, v.basis()));
}

FockVector ladder_apply(Ladder kind, int mode, const FockVector& v, const BasisPtr& target) {
  check_mode(mode, v.basis());
  check_target(kind, v.basis(), *target);
  FockVector out(target);
  for_each_hop(kind, mode, v.basis(), *target, bosonic_coefficient,
               [&](std::size_t col, std::size_t row, double f) { out[row] += f * v[col]; });
  return out;
}

FockVector field_apply(Ladder kind, std::span<const cplx> f, const FockVector& v) {
  const auto& in = v.basis();
  if (static_cast<int>(f.size()) != in.modes())
    throw ContractError("field_apply: test function has " + std::to_string(f.size()) + " entries, expected " +
                        std::to_string(in.modes()));
  const auto target = ladder_target(kind, in);
  FockVector out(target);
  for (int p = 0; p < in.modes(); ++p) {
    if (f[p] == cplx(0.0)) continue;
    for_each_hop(kind, p, in, *target, bosonic_coefficient,
                 [&](std::size_t col, std::size_t row, double c) { out[row] += f[p] * c * v[col]; });
  }
  return out;
}

FockVector field_apply(Ladder kind, const CVector& f, const FockVector& v) {
  return field_apply(kind, std::span<const cplx>(f.data(), static_cast<std::size_t>(f.size())), v);
}

SparseOperator ladder_matrix(Ladder kind, int mode, const BasisPtr& basis, LadderCoefficient coefficient) {
  if (!basis->is_truncated()) throw ContractError("ladder_matrix: needs a truncated basis");
  check_mode(mode, *basis);
  std::vector<Triplet> t;
  t.reserve(basis->size());
  for_each_hop(kind, mode, *basis, *basis, coefficient,
               [&](std::size_t col, std::size_t row, double f) { t.push_back({row, col, f}); });
  return SparseOperator(basis, std::move(t), false);
}

SparseOperator field_matrix(Ladder kind, std::span<const cplx> f, const BasisPtr& basis) {
  if (!basis->is_truncated()) throw ContractError("field_matrix: needs a truncated basis");
  if (static_cast<int>(f.size()) != basis->modes()) throw ContractError("field_matrix: test function length != modes");
  std::vector<Triplet> t;
  t.reserve(basis->size() * f.size());
  for (int p = 0; p < basis->modes(); ++p) {
    if (f[p] == cplx(0.0)) continue;
    for_each_hop(kind, p, *basis, *basis, bosonic_coefficient,
                 [&](std::size_t col, std::size_t row, double c) { t.push_back({row, col, f[p] * c}); });
  }
  return SparseOperator(basis, std::move(t), false);
}

FockVector sector_project(int n, const FockVector& v) {
  const auto& b = v.basis();
  if (n < 0 || n > b.max_total())
    throw ContractError("sector_project: sector " + std::to_string(n) + " outside " + b.sector().to_string());
  FockVector out(v.basis_ptr());
  if (!b.has_sector(n)) return out;
  const auto off = b.sector_offset(n);
  const auto len = b.sector_size(n);
  out.coeffs().segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(len)) =
      v.coeffs().segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(len));
  return out;
}

}  // namespace mflab
