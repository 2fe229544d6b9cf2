#include <cmath>
#include <string>
#include <vector>

#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"

namespace mflab {

namespace {

// exp(M) x for a nilpotent M: terminates once a term vanishes, which for a
// ladder-type M on a truncated basis happens after at most n_max+1 steps.
FockVector nilpotent_exp(const SparseOperator& m, const FockVector& x, int max_terms) {
  FockVector sum = x;
  FockVector term = x;
  FockVector next(x.basis_ptr());
  for (int k = 1; k <= max_terms; ++k) {
    m.apply(term.span(), next.span());
    next *= cplx(1.0 / k);
    if (next.norm2() == 0.0) break;
    sum += next;
    std::swap(term, next);
  }
  return sum;
}

}  // namespace

WeylResult weyl_apply(std::span<const cplx> alpha, const FockVector& v) {
  const auto& basis = v.basis_ptr();
  if (!basis->is_truncated())
    throw ContractError("weyl_apply: Weyl operators do not preserve particle number; needs a truncated basis, got " +
                        basis->sector().to_string());
  if (static_cast<int>(alpha.size()) != basis->modes())
    throw ContractError("weyl_apply: displacement has " + std::to_string(alpha.size()) + " entries, expected " +
                        std::to_string(basis->modes()));
  double a2 = 0.0;
  std::vector<cplx> minus_conj(alpha.size());
  for (std::size_t p = 0; p < alpha.size(); ++p) {
    a2 += std::norm(alpha[p]);
    minus_conj[p] = -std::conj(alpha[p]);
  }
  if (a2 == 0.0) return {v, 0.0};

  const int terms = basis->max_total() + 1;
  const auto lower = field_matrix(Ladder::annihilate, minus_conj, basis);
  const auto raise = field_matrix(Ladder::create, alpha, basis);
  FockVector out = nilpotent_exp(raise, nilpotent_exp(lower, v, terms), terms);
  out *= cplx(std::exp(-0.5 * a2));
  const double loss = v.norm2() - out.norm2();
  return {std::move(out), loss};
}

WeylResult weyl_apply(const CVector& alpha, const FockVector& v) {
  return weyl_apply(std::span<const cplx>(alpha.data(), static_cast<std::size_t>(alpha.size())), v);
}

int weyl_headroom(double alpha_norm) {
  return static_cast<int>(std::ceil(alpha_norm * alpha_norm + 8.0 * alpha_norm + 16.0 - 1e-12));
}

}  // namespace mflab
