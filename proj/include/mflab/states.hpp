#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mflab/fock_vector.hpp"

namespace mflab {

// m-particle excitation living entirely in the orthogonal complement of a
// reference one-particle state.
struct ExcitationState {
  int m = 0;
  FockVector psi;  // on a fixed(m) basis
  CVector orthogonal_to;
};

// phi^{(x) n} in the occupation basis: sqrt(n!/prod n_p!) prod phi_p^{n_p}.
FockVector product_state(const CVector& phi, int n, const BasisPtr& basis);

// C(sqrt(n) phi) applied to the vacuum. The basis must be truncated with the
// Weyl headroom for sqrt(n)|phi|.
FockVector coherent_state(const CVector& phi, int n, const BasisPtr& basis);

enum class ThetaMethod { symmetrize, creation_polynomial, weyl_projection };
ThetaMethod parse_theta_method(const std::string& s);

// Unit-norm symmetrization of phi^{(x)(n-m)} (x) psi_m. The three methods
// are independent constructions of the same vector:
//   symmetrize           symmetric product in the occupation basis
//   creation_polynomial  a*(phi)^{n-m} psi_m / sqrt((n-m)!)
//   weyl_projection      d_{n,m} P_n C(sqrt(n) phi) psi_m
FockVector theta_state(const CVector& phi, const ExcitationState& excitation, int n, ThetaMethod method,
                       const BasisPtr& basis);

// Random psi_m built from symmetric products of an orthonormal basis of the
// complement of phi (the vacuum for m = 0). Deterministic in seed. Needs at
// least two modes.
ExcitationState random_excitation(const CVector& phi, int m, std::uint64_t seed);

// |a(conj phi) psi|: zero when psi carries no particle in phi.
double orthogonality_defect(const CVector& phi, const FockVector& psi);

enum class SuperpositionKind { Phi, Theta, Psi };

struct SuperpositionSpec {
  SuperpositionKind kind = SuperpositionKind::Phi;
  std::vector<cplx> coeffs;
  std::vector<CVector> family;
  std::vector<ExcitationState> excitations;  // Theta only, one per component
};

struct Superposition {
  FockVector state;
  std::vector<cplx> coeffs_n;  // normalized coefficients at this n
  CMatrix gram;                // <component_i, component_j>
  // Largest gap between closed-form and numerical Gram entries (0 for Theta).
  double closed_form_defect = 0.0;
};

Superposition superposition(const SuperpositionSpec& spec, int n, const BasisPtr& basis);

// Closed-form component overlaps.
cplx product_overlap(const CVector& phi_i, const CVector& phi_j, int n);
cplx coherent_overlap(const CVector& phi_i, const CVector& phi_j, int n);

struct ThetaOverlap {
  cplx value;
  double bound;  // (m+1)(m!)^2 n^m |<phi_i, phi_j>|^{n-2m}
};
// Numerical overlap in fixed(n); throws InvariantError if it exceeds the
// bound. m is the larger excitation number.
ThetaOverlap theta_overlap(const CVector& phi_i, const ExcitationState& ex_i, const CVector& phi_j,
                           const ExcitationState& ex_j, int n);

}  // namespace mflab
