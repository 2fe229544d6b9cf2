#include "mflab/states.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <string>

#include "mflab/combinatorics.hpp"
#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"

namespace mflab {

namespace {

constexpr double kUnitTol = 1e-10;

void require_unit(const CVector& phi, const char* who) {
  if (std::abs(phi.norm() - 1.0) > kUnitTol)
    throw ContractError(std::string(who) + ": one-particle state must have unit norm, got " +
                        std::to_string(phi.norm()));
}

void require_modes(const CVector& phi, const FockBasis& b, const char* who) {
  if (phi.size() != b.modes())
    throw ContractError(std::string(who) + ": state has " + std::to_string(phi.size()) + " entries, basis has " +
                        std::to_string(b.modes()) + " modes");
}

// log of n! / prod n_p!
double log_multinomial(std::span<const Occupation> occ) {
  int n = 0;
  double acc = 0.0;
  for (auto k : occ) {
    n += k;
    acc -= std::lgamma(k + 1.0);
  }
  return acc + std::lgamma(n + 1.0);
}

}  // namespace

ThetaMethod parse_theta_method(const std::string& s) {
  if (s == "symmetrize") return ThetaMethod::symmetrize;
  if (s == "creation_polynomial") return ThetaMethod::creation_polynomial;
  if (s == "weyl_projection") return ThetaMethod::weyl_projection;
  throw ConfigError("unknown theta method '" + s + "'");
}

FockVector product_state(const CVector& phi, int n, const BasisPtr& basis) {
  require_modes(phi, *basis, "product_state");
  require_unit(phi, "product_state");
  if (!basis->has_sector(n)) throw ContractError("product_state: basis lacks sector " + std::to_string(n));
  FockVector out(basis);
  const auto off = basis->sector_offset(n);
  for (std::size_t i = off; i < off + basis->sector_size(n); ++i) {
    const auto occ = basis->occupation(i);
    cplx amp = std::exp(0.5 * log_multinomial(occ));
    for (int p = 0; p < basis->modes() && amp != cplx(0.0); ++p)
      if (occ[p] > 0) amp *= std::pow(phi[p], static_cast<int>(occ[p]));
    out[i] = amp;
  }
  return out;
}

FockVector coherent_state(const CVector& phi, int n, const BasisPtr& basis) {
  require_modes(phi, *basis, "coherent_state");
  if (!basis->is_truncated()) throw ContractError("coherent_state: needs a truncated basis");
  const double a = std::sqrt(static_cast<double>(n)) * phi.norm();
  if (basis->max_total() < weyl_headroom(a))
    throw ContractError("coherent_state: cutoff " + std::to_string(basis->max_total()) + " below headroom " +
                        std::to_string(weyl_headroom(a)));
  const CVector alpha = std::sqrt(static_cast<double>(n)) * phi;
  return weyl_apply(alpha, FockVector::vacuum(basis)).state;
}

double orthogonality_defect(const CVector& phi, const FockVector& psi) {
  if (psi.basis().is_fixed() && psi.basis().sector().n == 0) return 0.0;
  const CVector contraction = phi.conjugate();
  return field_apply(Ladder::annihilate, contraction, psi).norm();
}

FockVector theta_state(const CVector& phi, const ExcitationState& excitation, int n, ThetaMethod method,
                       const BasisPtr& basis) {
  const int m = excitation.m;
  require_modes(phi, *basis, "theta_state");
  require_unit(phi, "theta_state");
  if (m < 0 || m > n) throw ContractError("theta_state: need 0 <= m <= n");
  if (!basis->has_sector(n)) throw ContractError("theta_state: basis lacks sector " + std::to_string(n));

  const auto& psi = excitation.psi;
  if (!psi.basis().is_fixed() || psi.basis().sector().n != m || psi.basis().modes() != basis->modes())
    throw ContractError("theta_state: excitation must live on fixed(m) over the same modes");
  if (const double defect = orthogonality_defect(phi, psi); defect > 1e-10)
    throw ContractError("theta_state: excitation not orthogonal to phi (defect " + std::to_string(defect) + ")");

  const int d = basis->modes();
  const auto sector_n = shared_basis(d, Sector::fixed(n));
  FockVector theta(sector_n);

  switch (method) {
    case ThetaMethod::symmetrize: {
      // S(|K> (x) |L>) = sqrt(k! l! prod N_p! / (n! prod K_p! prod L_p!)) |K+L>
      const auto cond = product_state(phi, n - m, shared_basis(d, Sector::fixed(n - m)));
      const auto& kb = cond.basis();
      const auto& lb = psi.basis();
      const double log_c = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0));
      const double log_kl = std::lgamma(n - m + 1.0) + std::lgamma(m + 1.0) - std::lgamma(n + 1.0);
      std::vector<int> occ(static_cast<std::size_t>(d));
      for (std::size_t j = 0; j < lb.size(); ++j) {
        if (psi[j] == cplx(0.0)) continue;
        const auto l = lb.occupation(j);
        for (std::size_t i = 0; i < kb.size(); ++i) {
          if (cond[i] == cplx(0.0)) continue;
          const auto k = kb.occupation(i);
          double log_w = log_kl;
          for (int p = 0; p < d; ++p) {
            occ[p] = k[p] + l[p];
            log_w += std::lgamma(occ[p] + 1.0) - std::lgamma(k[p] + 1.0) - std::lgamma(l[p] + 1.0);
          }
          theta[*sector_n->find(std::span<const int>(occ))] += std::exp(log_c + 0.5 * log_w) * cond[i] * psi[j];
        }
      }
      break;
    }
    case ThetaMethod::creation_polynomial: {
      FockVector acc = psi;
      for (int k = 0; k < n - m; ++k) acc = field_apply(Ladder::create, phi, acc);
      acc *= cplx(std::exp(-0.5 * std::lgamma(n - m + 1.0)));
      theta = std::move(acc);
      break;
    }
    case ThetaMethod::weyl_projection: {
      // The creation monomial of psi_m acting on the vacuum is sqrt(m!) psi_m,
      // which cancels the 1/sqrt(m!) prefactor. Creation only raises and
      // annihilation only lowers, so a cutoff at n is exact for P_n.
      const auto trunc = shared_basis(d, Sector::truncated(n));
      const CVector alpha = std::sqrt(static_cast<double>(n)) * phi;
      const auto shifted = weyl_apply(alpha, embed(psi, trunc)).state;
      theta = extract_sector(shifted, n);
      theta *= cplx(std::exp(log_dnm(n, m)));
      break;
    }
  }
  return same_basis(*sector_n, *basis) ? theta : embed(theta, basis);
}

ExcitationState random_excitation(const CVector& phi, int m, std::uint64_t seed) {
  const int d = static_cast<int>(phi.size());
  if (d < 2) throw ContractError("random_excitation: needs at least two modes");
  if (m < 0) throw ContractError("random_excitation: needs m >= 0");
  require_unit(phi, "random_excitation");
  if (m == 0) return {0, FockVector::vacuum(shared_basis(d, Sector::fixed(0))), phi};

  // Orthonormal basis of the complement of phi by Gram-Schmidt on e_0..e_{d-1}.
  std::vector<CVector> comp;
  for (int j = 0; j < d && static_cast<int>(comp.size()) < d - 1; ++j) {
    CVector u = CVector::Unit(d, j);
    for (int pass = 0; pass < 2; ++pass) {
      u -= phi.dot(u) * phi;
      for (const auto& c : comp) u -= c.dot(u) * c;
    }
    if (u.norm() > 1e-8) comp.push_back(u.normalized());
  }

  const int dc = static_cast<int>(comp.size());
  const auto small = shared_basis(dc, Sector::fixed(m));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  CVector c(static_cast<Eigen::Index>(small->size()));
  for (auto& z : c) z = cplx(gauss(rng), gauss(rng));
  c.normalize();

  // Map each complement-mode occupation state prod (b_j^+)^{L_j}/sqrt(L_j!)
  // onto the original modes.
  const auto target = shared_basis(d, Sector::fixed(m));
  const auto vac = shared_basis(d, Sector::fixed(0));
  FockVector psi(target);
  for (std::size_t i = 0; i < small->size(); ++i) {
    FockVector acc = FockVector::vacuum(vac);
    double log_norm = 0.0;
    const auto occ = small->occupation(i);
    for (int j = 0; j < dc; ++j) {
      for (int r = 0; r < occ[j]; ++r) acc = field_apply(Ladder::create, comp[j], acc);
      log_norm += std::lgamma(occ[j] + 1.0);
    }
    psi.axpy(c[static_cast<Eigen::Index>(i)] * std::exp(-0.5 * log_norm), acc);
  }
  // Fix the global phase: first non-negligible coefficient real positive.
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (std::abs(psi[i]) > 1e-12) {
      psi *= std::conj(psi[i]) / std::abs(psi[i]);
      psi[i] = std::abs(psi[i]);
      break;
    }
  }
  psi = psi.normalized();
  return {m, std::move(psi), phi};
}

cplx product_overlap(const CVector& phi_i, const CVector& phi_j, int n) { return std::pow(phi_i.dot(phi_j), n); }

cplx coherent_overlap(const CVector& phi_i, const CVector& phi_j, int n) {
  const double nn = n;
  const double phase = nn * phi_i.dot(phi_j).imag();
  const double gap = (phi_j - phi_i).squaredNorm();
  return std::polar(std::exp(-0.5 * nn * gap), phase);
}

ThetaOverlap theta_overlap(const CVector& phi_i, const ExcitationState& ex_i, const CVector& phi_j,
                           const ExcitationState& ex_j, int n) {
  const auto basis = shared_basis(static_cast<int>(phi_i.size()), Sector::fixed(n));
  const auto ti = theta_state(phi_i, ex_i, n, ThetaMethod::creation_polynomial, basis);
  const auto tj = theta_state(phi_j, ex_j, n, ThetaMethod::creation_polynomial, basis);
  const int m = std::max(ex_i.m, ex_j.m);
  const double fact = std::exp(std::lgamma(m + 1.0));
  const double bound = (m + 1.0) * fact * fact * std::pow(static_cast<double>(n), m) *
                       std::pow(std::abs(phi_i.dot(phi_j)), n - 2 * m);
  const cplx value = ti.dot(tj);
  if (std::abs(value) > bound * (1.0 + 1e-12) + 1e-14)
    throw InvariantError("theta_overlap: |<theta_i, theta_j>| = " + std::to_string(std::abs(value)) +
                         " exceeds bound " + std::to_string(bound));
  return {value, bound};
}

Superposition superposition(const SuperpositionSpec& spec, int n, const BasisPtr& basis) {
  const std::size_t count = spec.family.size();
  if (count == 0 || spec.coeffs.size() != count) throw ContractError("superposition: need one coefficient per state");
  if (spec.kind == SuperpositionKind::Theta && spec.excitations.size() != count)
    throw ContractError("superposition: Theta needs one excitation per state");

  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.kind == SuperpositionKind::Psi) {
        if ((spec.family[i] - spec.family[j]).norm() == 0.0)
          throw DegeneracyError("superposition: Psi components " + std::to_string(j) + " and " + std::to_string(i) +
                                " coincide");
      } else if (std::abs(spec.family[i].dot(spec.family[j])) >= 1.0 - 1e-12) {
        throw DegeneracyError("superposition: states " + std::to_string(j) + " and " + std::to_string(i) +
                              " are linearly dependent");
      }
    }
  }

  std::vector<FockVector> parts;
  parts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    switch (spec.kind) {
      case SuperpositionKind::Phi: parts.push_back(product_state(spec.family[i], n, basis)); break;
      case SuperpositionKind::Theta:
        parts.push_back(
            theta_state(spec.family[i], spec.excitations[i], n, ThetaMethod::creation_polynomial, basis));
        break;
      case SuperpositionKind::Psi: parts.push_back(coherent_state(spec.family[i], n, basis)); break;
    }
  }

  const auto cn = static_cast<Eigen::Index>(count);
  CMatrix numeric(cn, cn);
  for (Eigen::Index i = 0; i < cn; ++i)
    for (Eigen::Index j = 0; j < cn; ++j)
      numeric(i, j) = parts[static_cast<std::size_t>(i)].dot(parts[static_cast<std::size_t>(j)]);

  Superposition out{FockVector(basis), {}, numeric, 0.0};
  if (spec.kind != SuperpositionKind::Theta) {
    for (Eigen::Index i = 0; i < cn; ++i) {
      for (Eigen::Index j = 0; j < cn; ++j) {
        const auto& a = spec.family[static_cast<std::size_t>(i)];
        const auto& b = spec.family[static_cast<std::size_t>(j)];
        out.gram(i, j) = spec.kind == SuperpositionKind::Phi ? product_overlap(a, b, n) : coherent_overlap(a, b, n);
        out.closed_form_defect = std::max(out.closed_form_defect, std::abs(out.gram(i, j) - numeric(i, j)));
      }
    }
  }

  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(out.gram, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 1e-10)
    throw DegeneracyError("superposition: Gram matrix numerically singular (min eigenvalue " +
                          std::to_string(eig.eigenvalues().minCoeff()) + ")");

  CVector c(cn);
  for (Eigen::Index i = 0; i < cn; ++i) c[i] = spec.coeffs[static_cast<std::size_t>(i)];
  const double norm2 = c.dot(out.gram * c).real();
  if (!(norm2 > 0.0)) throw DegeneracyError("superposition: coefficients give a zero vector");
  const double scale = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < count; ++i) {
    out.coeffs_n.push_back(spec.coeffs[i] * scale);
    out.state.axpy(out.coeffs_n.back(), parts[i]);
  }
  return out;
}

}  // namespace mflab
