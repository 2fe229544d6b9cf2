#pragma once

#include <vector>

#include "mflab/fock_vector.hpp"

namespace mflab {

// T_pq = <v, a+_p a_q v>
CMatrix transition_matrix(const FockVector& v);

// One-particle reduced density matrix: rho = T^T / tr T, so that
// rho = |phi><phi| (entries phi_p conj(phi_q)) for a condensate in phi.
struct OneParticleDM {
  CMatrix rho;
  double trace_raw = 0.0;  // <N> before normalization
};

// Throws ContractError for the vacuum and InvariantError when the spectrum
// dips below -1e-10 or Hermiticity fails.
OneParticleDM reduced_dm(const FockVector& v);
void check_density_matrix(const CMatrix& rho);

enum class DistanceNorm { trace, hilbert_schmidt, op };

struct Distances {
  double trace, hilbert_schmidt, op;
};
double distance(const CMatrix& a, const CMatrix& b, DistanceNorm norm);
// All three norms from one eigendecomposition; throws InvariantError if the
// ordering op <= HS <= trace fails, or trace > 2 HS when b is rank one.
Distances distances(const CMatrix& a, const CMatrix& b);

CMatrix projector(const CVector& phi);
// sum_i w_i |phi_i><phi_i| with the weights summing to one.
OneParticleDM mixed_target(const std::vector<double>& weights, const std::vector<CVector>& phis);
// |c_i|^2 / sum_j |c_j|^2
std::vector<double> limit_weights(const std::vector<cplx>& coeffs);

}  // namespace mflab
