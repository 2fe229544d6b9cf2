#include "mflab/mode_system.hpp"

#include <cmath>
#include <cstdlib>

#include "mflab/error.hpp"

namespace mflab {

PairPotential parse_pair_potential(const std::string& s) {
  if (s == "none") return PairPotential::none;
  if (s == "contact") return PairPotential::contact;
  if (s == "gaussian") return PairPotential::gaussian;
  if (s == "uniform") return PairPotential::uniform;
  throw ConfigError("unknown pair potential '" + s + "'");
}

std::string to_string(PairPotential p) {
  switch (p) {
    case PairPotential::none: return "none";
    case PairPotential::contact: return "contact";
    case PairPotential::gaussian: return "gaussian";
    case PairPotential::uniform: return "uniform";
  }
  return "?";
}

ModeSystem::ModeSystem(CMatrix h, RMatrix v) : h_(std::move(h)), v_(std::move(v)) {
  const auto d = h_.rows();
  if (d < 1 || h_.cols() != d) throw ContractError("ModeSystem: h must be square with d >= 1");
  if (v_.rows() != d || v_.cols() != d) throw ContractError("ModeSystem: v must be d x d");
  if (!h_.allFinite()) throw ContractError("ModeSystem: h has non-finite entries");
  if ((h_ - h_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw ContractError("ModeSystem: h is not Hermitian");
  if (!v_.allFinite()) throw ContractError("ModeSystem: v has non-finite entries");
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = 0; q < p; ++q)
      if (v_(p, q) != v_(q, p)) throw ContractError("ModeSystem: v is not symmetric");
}

ModeSystem ModeSystem::dense(CMatrix h, RMatrix v) { return ModeSystem(std::move(h), std::move(v)); }

ModeSystem ModeSystem::lattice(const LatticeSpec& spec) {
  const int L = spec.sites;
  if (L < 1) throw ConfigError("lattice: sites must be >= 1");
  if (!spec.onsite.empty() && static_cast<int>(spec.onsite.size()) != L)
    throw ConfigError("lattice: onsite needs one value per site");
  if (spec.range <= 0.0) throw ConfigError("lattice: range must be positive");

  CMatrix h = CMatrix::Zero(L, L);
  auto bond = [&](int a, int b) {
    h(a, a) += spec.hopping;
    h(b, b) += spec.hopping;
    h(a, b) -= spec.hopping;
    h(b, a) -= spec.hopping;
  };
  if (L == 2) {
    bond(0, 1);
  } else if (L > 2) {
    for (int s = 0; s < L; ++s) bond(s, (s + 1) % L);
  }
  for (int s = 0; s < static_cast<int>(spec.onsite.size()); ++s) h(s, s) += spec.onsite[s];

  RMatrix v = RMatrix::Zero(L, L);
  for (int p = 0; p < L; ++p) {
    for (int q = 0; q < L; ++q) {
      const int raw = std::abs(p - q);
      const int dist = std::min(raw, L - raw);
      switch (spec.potential) {
        case PairPotential::none: break;
        case PairPotential::contact: v(p, q) = p == q ? spec.coupling : 0.0; break;
        case PairPotential::uniform: v(p, q) = spec.coupling; break;
        case PairPotential::gaussian:
          v(p, q) = spec.coupling * std::exp(-0.5 * dist * dist / (spec.range * spec.range));
          break;
      }
    }
  }
  return ModeSystem(std::move(h), std::move(v));
}

ModeSystem ModeSystem::with_coupling_scaled(double s) const { return ModeSystem(h_, s * v_); }

}  // namespace mflab
