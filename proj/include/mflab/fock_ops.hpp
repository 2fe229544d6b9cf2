#pragma once

#include <span>

#include "mflab/fock_vector.hpp"
#include "mflab/mode_system.hpp"
#include "mflab/sparse_operator.hpp"

namespace mflab {

enum class Ladder { create, annihilate };

// Factor picked up when one particle leaves a mode holding `occupation`
// particles. The physical value is sqrt(occupation); tests substitute a
// corrupted one to make sure the algebra checks can fail.
using LadderCoefficient = double (*)(int occupation);
double bosonic_coefficient(int occupation);

// Basis that a^#_p maps `in` onto: fixed(n) -> fixed(n +- 1), truncated
// bases map into themselves (creation above the cutoff is dropped).
BasisPtr ladder_target(Ladder kind, const FockBasis& in);

FockVector ladder_apply(Ladder kind, int mode, const FockVector& v);
FockVector ladder_apply(Ladder kind, int mode, const FockVector& v, const BasisPtr& target);

// a(f) = sum_p f_p a_p and a*(f) = sum_p f_p a+_p. Both are linear in f.
FockVector field_apply(Ladder kind, std::span<const cplx> f, const FockVector& v);
FockVector field_apply(Ladder kind, const CVector& f, const FockVector& v);

// Ladder operators as matrices on a truncated basis.
SparseOperator ladder_matrix(Ladder kind, int mode, const BasisPtr& basis,
                             LadderCoefficient coefficient = bosonic_coefficient);
SparseOperator field_matrix(Ladder kind, std::span<const cplx> f, const BasisPtr& basis);

// sum_pq A_pq a+_p a_q
SparseOperator second_quantize(const CMatrix& a, const BasisPtr& basis);
SparseOperator number_operator(const BasisPtr& basis);

// dGamma(h) + (1/2 n_scale) sum_pq v(p,q) a+_p a+_q a_q a_p
SparseOperator build_hamiltonian(const ModeSystem& ms, int n_scale, const BasisPtr& basis);

// Keep only the coefficients with total occupation n.
FockVector sector_project(int n, const FockVector& v);

struct WeylResult {
  FockVector state;
  // ||v||^2 - ||C(alpha) v||^2: the weight pushed above the cutoff
  double truncation_loss;
};

// C(alpha) = exp(a*(alpha) - a(conj alpha)) in normal-ordered form, applied
// as two terminating power series. Exact on every retained sector; the only
// error is the weight that leaves the truncated basis.
WeylResult weyl_apply(std::span<const cplx> alpha, const FockVector& v);
WeylResult weyl_apply(const CVector& alpha, const FockVector& v);

// Smallest cutoff satisfying n_max >= |alpha|^2 + 8|alpha| + 16.
int weyl_headroom(double alpha_norm);

}  // namespace mflab
