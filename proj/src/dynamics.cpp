#include "mflab/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"
#include "mflab/kernels.hpp"

namespace mflab {

PropagatorMethod parse_propagator_method(const std::string& s) {
  if (s == "auto") return PropagatorMethod::automatic;
  if (s == "dense" || s == "dense_eig") return PropagatorMethod::dense_eig;
  if (s == "krylov") return PropagatorMethod::krylov;
  throw ConfigError("unknown propagator method '" + s + "'");
}

std::string to_string(PropagatorMethod m) {
  switch (m) {
    case PropagatorMethod::automatic: return "auto";
    case PropagatorMethod::dense_eig: return "dense_eig";
    case PropagatorMethod::krylov: return "krylov";
  }
  return "?";
}

PropagatorPlan::PropagatorPlan(SparseOperator hamiltonian, PropagatorOptions options)
    : h_(std::move(hamiltonian)), options_(options) {
  if (!h_.hermitian() || h_.hermiticity_defect() > 1e-12)
    throw ContractError("PropagatorPlan: Hamiltonian is not Hermitian");
  if (options_.krylov_dim < 2) throw ContractError("PropagatorPlan: krylov_dim must be >= 2");
  if (!(options_.tol > 0.0) || options_.tol > 1e-10)
    throw ContractError("PropagatorPlan: Krylov tolerance must lie in (0, 1e-10]");

  const std::size_t dim = h_.dim();
  method_ = options_.method;
  if (method_ == PropagatorMethod::automatic)
    method_ = dim <= options_.dense_limit ? PropagatorMethod::dense_eig : PropagatorMethod::krylov;
  if (method_ == PropagatorMethod::krylov) return;
  if (dim > options_.dense_limit)
    throw CapacityError("PropagatorPlan: dense path limited to dimension " + std::to_string(options_.dense_limit) +
                        ", basis has " + std::to_string(dim));

  const auto& b = h_.basis();
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  if (h_.conserves_number()) {
    for (int k = b.min_total(); k <= b.max_total(); ++k) ranges.emplace_back(b.sector_offset(k), b.sector_size(k));
  } else {
    ranges.emplace_back(0, dim);
  }
  for (auto [off, len] : ranges) {
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(h_.dense_block(off, len));
    if (eig.info() != Eigen::Success) throw InvariantError("PropagatorPlan: eigensolver failed");
    blocks_.push_back({off, len, eig.eigenvalues(), eig.eigenvectors()});
  }
}

FockVector PropagatorPlan::evolve(const FockVector& v, double t) const {
  if (!same_basis(v.basis(), h_.basis())) throw ContractError("PropagatorPlan::evolve: basis mismatch");
  if (t == 0.0) return v;
  return method_ == PropagatorMethod::dense_eig ? evolve_dense(v, t) : evolve_krylov(v, t);
}

FockVector PropagatorPlan::evolve_dense(const FockVector& v, double t) const {
  FockVector out(v.basis_ptr());
  for (const auto& blk : blocks_) {
    const auto off = static_cast<Eigen::Index>(blk.offset);
    const auto len = static_cast<Eigen::Index>(blk.size);
    CVector x = blk.vectors.adjoint() * v.coeffs().segment(off, len);
    for (Eigen::Index i = 0; i < len; ++i) x[i] *= std::polar(1.0, -t * blk.energies[i]);
    out.coeffs().segment(off, len) = blk.vectors * x;
  }
  return out;
}

FockVector PropagatorPlan::evolve_krylov(const FockVector& v, double t) const {
  const std::size_t dim = h_.dim();
  const double v_norm = v.norm();
  FockVector w = v;
  if (v_norm == 0.0) return w;

  const int mmax = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options_.krylov_dim), dim));
  const double total = std::abs(t);
  const double sign = t < 0 ? -1.0 : 1.0;
  double done = 0.0;
  double dt = total;
  int substeps = 0;

  std::vector<CVector> basis;
  std::vector<double> alpha, beta;
  CVector hv(static_cast<Eigen::Index>(dim));

  while (done < total) {
    // Lanczos on the current vector
    const double beta0 = w.norm();
    basis.assign(1, w.coeffs() / beta0);
    alpha.clear();
    beta.clear();
    double next_beta = 0.0;
    bool invariant = false;
    for (int j = 0; j < mmax; ++j) {
      const CVector& q = basis[static_cast<std::size_t>(j)];
      h_.apply(std::span<const cplx>(q.data(), dim), std::span<cplx>(hv.data(), dim));
      const double a = kernels::dotc({q.data(), dim}, {hv.data(), dim}).real();
      alpha.push_back(a);
      // full reorthogonalization, two passes
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : basis) {
          const cplx c = kernels::dotc({u.data(), dim}, {hv.data(), dim});
          kernels::axpy(-c, {u.data(), dim}, {hv.data(), dim});
        }
      }
      next_beta = hv.norm();
      if (next_beta <= 1e-13 * std::max(1.0, std::abs(a))) {
        invariant = true;
        break;
      }
      if (j + 1 < mmax) {
        beta.push_back(next_beta);
        basis.push_back(hv / next_beta);
      }
    }
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) tri(i, i) = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);

    const double remaining = total - done;
    dt = std::min(dt, remaining);
    CVector coeff;
    while (true) {
      CVector phase(m);
      for (int i = 0; i < m; ++i) phase[i] = std::polar(eig.eigenvectors()(0, i), -sign * dt * eig.eigenvalues()[i]);
      coeff = eig.eigenvectors().cast<cplx>() * phase;
      const double err = invariant ? 0.0 : beta0 * next_beta * std::abs(coeff[m - 1]);
      if (err <= options_.tol * v_norm * dt / total) break;
      dt *= 0.5;
      if (dt < total * 1e-12 || ++substeps > options_.max_substeps)
        throw KrylovError("Krylov propagator failed to converge (step " + std::to_string(dt) + ")");
    }
    CVector next = CVector::Zero(static_cast<Eigen::Index>(dim));
    for (int i = 0; i < m; ++i) next += (beta0 * coeff[i]) * basis[static_cast<std::size_t>(i)];
    w.coeffs() = std::move(next);
    done += dt;
    if (remaining - dt <= total * 1e-15) done = total;
    if (++substeps > options_.max_substeps) throw KrylovError("Krylov propagator exceeded its substep budget");
    dt = std::min(2.0 * dt, total - done);
    if (dt <= 0.0) break;
  }
  return w;
}

FluctuationResult fluctuation_apply(const PropagatorPlan& plan, int n, const HartreeTrajectory& trajectory,
                                    const FockVector& v, double t) {
  const auto& basis = plan.basis_ptr();
  if (!basis->is_truncated()) throw ContractError("fluctuation_apply: needs a truncated basis");
  if (!same_basis(v.basis(), *basis)) throw ContractError("fluctuation_apply: basis mismatch");
  if (!trajectory.covers(0.0) || !trajectory.covers(t))
    throw ContractError("fluctuation_apply: trajectory does not cover t = " + std::to_string(t));
  const double root_n = std::sqrt(static_cast<double>(n));
  const CVector phi0 = trajectory.at(0.0);
  const CVector phit = trajectory.at(t);
  const int need = weyl_headroom(root_n * std::max(phi0.norm(), phit.norm()));
  if (basis->max_total() < need)
    throw ContractError("fluctuation_apply: cutoff " + std::to_string(basis->max_total()) + " below headroom " +
                        std::to_string(need));

  const CVector alpha0 = root_n * phi0;
  const CVector back = -root_n * phit;
  auto shifted = weyl_apply(alpha0, v).state;
  auto evolved = plan.evolve(shifted, t);
  auto out = weyl_apply(back, evolved).state;
  const double loss = v.norm2() - out.norm2();
  return {std::move(out), loss};
}

double number_moment(const FockVector& v, double delta) {
  if (delta < 0.0) throw ContractError("number_moment: delta must be >= 0");
  const auto w = v.sector_weights();
  const int k0 = v.basis().min_total();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += std::pow(k0 + static_cast<double>(i) + 1.0, 2.0 * delta) * w[i];
  return std::sqrt(acc);
}

GrowthEnvelope fit_growth_envelope(const std::vector<double>& times, const std::vector<double>& log_values) {
  if (times.size() != log_values.size() || times.size() < 2)
    throw ContractError("fit_growth_envelope: need at least two (t, value) pairs");
  const double count = static_cast<double>(times.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double x = std::abs(times[i]);
    sx += x;
    sy += log_values[i];
    sxx += x * x;
    sxy += x * log_values[i];
  }
  const double denom = count * sxx - sx * sx;
  const double ls = denom == 0.0 ? 0.0 : (count * sxy - sx * sy) / denom;
  const double slope = std::max(ls, 1e-6);
  double intercept = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) intercept = std::max(intercept, log_values[i] - slope * std::abs(times[i]));
  return {intercept, slope, ls};
}

}  // namespace mflab
