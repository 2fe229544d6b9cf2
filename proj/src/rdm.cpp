#include "mflab/rdm.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"

namespace mflab {

namespace {
constexpr double kPsdFloor = -1e-10;
}

CMatrix transition_matrix(const FockVector& v) {
  const int d = v.basis().modes();
  CMatrix t = CMatrix::Zero(d, d);
  if (v.basis().max_total() == 0) return t;
  std::vector<FockVector> lowered;
  lowered.reserve(static_cast<std::size_t>(d));
  for (int q = 0; q < d; ++q) lowered.push_back(ladder_apply(Ladder::annihilate, q, v));
  for (int p = 0; p < d; ++p) {
    t(p, p) = lowered[static_cast<std::size_t>(p)].norm2();
    for (int q = p + 1; q < d; ++q) {
      t(p, q) = lowered[static_cast<std::size_t>(p)].dot(lowered[static_cast<std::size_t>(q)]);
      t(q, p) = std::conj(t(p, q));
    }
  }
  return t;
}

void check_density_matrix(const CMatrix& rho) {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) throw InvariantError("density matrix not Hermitian (defect " + std::to_string(herm) + ")");
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  if (lo < kPsdFloor) throw InvariantError("density matrix has eigenvalue " + std::to_string(lo) + " below floor");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) throw InvariantError("density matrix trace " + std::to_string(tr) + " != 1");
}

OneParticleDM reduced_dm(const FockVector& v) {
  const CMatrix t = transition_matrix(v);
  const double n = t.trace().real();
  if (!(n > 0.0)) throw ContractError("reduced_dm: state has no particles");
  OneParticleDM out{t.transpose() / n, n};
  check_density_matrix(out.rho);
  return out;
}

Distances distances(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ContractError("distance: dimension mismatch");
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(a - b, Eigen::EigenvaluesOnly);
  const auto& lam = eig.eigenvalues();
  Distances d{lam.cwiseAbs().sum(), std::sqrt(lam.squaredNorm()), lam.cwiseAbs().maxCoeff()};
  const double slack = 1e-12 * std::max(1.0, d.trace);
  if (d.op > d.hilbert_schmidt + slack || d.hilbert_schmidt > d.trace + slack)
    throw InvariantError("distance: norm ordering op <= HS <= trace violated");

  const Eigen::SelfAdjointEigenSolver<CMatrix> eb(b, Eigen::EigenvaluesOnly);
  const auto& mu = eb.eigenvalues();  // ascending
  const bool rank_one = mu.size() == 1 || (mu.size() > 1 && std::abs(mu[mu.size() - 2]) < 1e-12 && mu[0] > -1e-12);
  const bool unit_traces = std::abs(a.trace().real() - 1.0) < 1e-10 && std::abs(b.trace().real() - 1.0) < 1e-10;
  if (rank_one && unit_traces && d.trace > 2.0 * d.hilbert_schmidt + slack)
    throw InvariantError("distance: trace > 2 HS against a rank-one projector");
  return d;
}

double distance(const CMatrix& a, const CMatrix& b, DistanceNorm norm) {
  const auto d = distances(a, b);
  switch (norm) {
    case DistanceNorm::trace: return d.trace;
    case DistanceNorm::hilbert_schmidt: return d.hilbert_schmidt;
    case DistanceNorm::op: return d.op;
  }
  return d.trace;
}

CMatrix projector(const CVector& phi) { return phi * phi.adjoint(); }

OneParticleDM mixed_target(const std::vector<double>& weights, const std::vector<CVector>& phis) {
  if (weights.size() != phis.size() || weights.empty()) throw ContractError("mixed_target: one weight per state");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ContractError("mixed_target: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10) throw ContractError("mixed_target: weights sum to " + std::to_string(total));
  const auto d = phis.front().size();
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (phis[i].size() != d) throw ContractError("mixed_target: states of different length");
    if (std::abs(phis[i].norm() - 1.0) > 1e-10) throw ContractError("mixed_target: state not normalized");
    rho += weights[i] * projector(phis[i]);
  }
  return {rho, 1.0};
}

std::vector<double> limit_weights(const std::vector<cplx>& coeffs) {
  double total = 0.0;
  for (auto c : coeffs) total += std::norm(c);
  if (!(total > 0.0)) throw ContractError("limit_weights: all coefficients vanish");
  std::vector<double> w;
  for (auto c : coeffs) w.push_back(std::norm(c) / total);
  return w;
}

}  // namespace mflab
