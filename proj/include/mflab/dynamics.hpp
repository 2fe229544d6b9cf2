#pragma once

#include <string>
#include <vector>

#include "mflab/fock_vector.hpp"
#include "mflab/hartree.hpp"
#include "mflab/sparse_operator.hpp"

namespace mflab {

enum class PropagatorMethod { automatic, dense_eig, krylov };
PropagatorMethod parse_propagator_method(const std::string& s);
std::string to_string(PropagatorMethod m);

struct PropagatorOptions {
  PropagatorMethod method = PropagatorMethod::automatic;
  int krylov_dim = 30;
  double tol = 1e-10;  // Krylov error budget over the whole evolution
  std::size_t dense_limit = 4000;
  int max_substeps = 100'000;
};

// exp(-i t H) for a fixed Hermitian H. The dense path diagonalizes each
// particle-number block once and is reused for every t; the Krylov path runs
// Lanczos with full reorthogonalization and adaptive substeps. Immutable and
// safe to share across threads.
class PropagatorPlan {
 public:
  explicit PropagatorPlan(SparseOperator hamiltonian, PropagatorOptions options = {});

  PropagatorMethod method() const { return method_; }
  const SparseOperator& hamiltonian() const { return h_; }
  const BasisPtr& basis_ptr() const { return h_.basis_ptr(); }
  const PropagatorOptions& options() const { return options_; }

  FockVector evolve(const FockVector& v, double t) const;

 private:
  struct Block {
    std::size_t offset, size;
    Eigen::VectorXd energies;
    CMatrix vectors;
  };

  FockVector evolve_dense(const FockVector& v, double t) const;
  FockVector evolve_krylov(const FockVector& v, double t) const;

  SparseOperator h_;
  PropagatorOptions options_;
  PropagatorMethod method_;
  std::vector<Block> blocks_;
};

inline FockVector evolve_fock(const PropagatorPlan& plan, const FockVector& v, double t) { return plan.evolve(v, t); }

struct FluctuationResult {
  FockVector state;
  double truncation_loss;  // ||v||^2 - ||W v||^2
};

// W(t, 0) v = C(sqrt(n) phi_t)^* U(t) C(sqrt(n) phi_0) v, applied factor by
// factor. plan must hold the n-scaled Hamiltonian on a truncated basis.
FluctuationResult fluctuation_apply(const PropagatorPlan& plan, int n, const HartreeTrajectory& trajectory,
                                    const FockVector& v, double t);

// ||(N+1)^delta v||, from the sector weights.
double number_moment(const FockVector& v, double delta);

// Affine upper envelope a + b|t| of log-moment data: least-squares slope,
// floored at a small positive value, with the intercept raised until every
// point lies on or below the line.
struct GrowthEnvelope {
  double intercept;
  double slope;
  double ls_slope;
};
GrowthEnvelope fit_growth_envelope(const std::vector<double>& times, const std::vector<double>& log_values);

}  // namespace mflab
