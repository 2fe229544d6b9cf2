#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "mflab/fock_vector.hpp"

namespace mflab {

using RMatrix = Eigen::MatrixXd;

enum class PairPotential { none, contact, gaussian, uniform };

PairPotential parse_pair_potential(const std::string& s);
std::string to_string(PairPotential p);

// Periodic lattice of `sites` points. The one-body part is hopping times the
// graph Laplacian of the ring (a single bond for two sites) plus an optional
// on-site term; the pair kernel is a function of ring distance.
struct LatticeSpec {
  int sites = 2;
  double hopping = 1.0;
  std::vector<double> onsite;  // empty or one value per site
  PairPotential potential = PairPotential::contact;
  double coupling = 1.0;
  double range = 1.0;  // gaussian width in lattice units
};

// Discretized one-particle space: d modes, Hermitian one-body matrix and a
// symmetric real pair kernel acting diagonally in the mode index.
class ModeSystem {
 public:
  static ModeSystem lattice(const LatticeSpec& spec);
  static ModeSystem dense(CMatrix h, RMatrix v);

  int modes() const { return static_cast<int>(h_.rows()); }
  const CMatrix& one_body() const { return h_; }
  const RMatrix& pair() const { return v_; }
  double pair(int p, int q) const { return v_(p, q); }
  bool interacting() const { return !v_.isZero(0.0); }

  // Same geometry with the pair kernel scaled by s.
  ModeSystem with_coupling_scaled(double s) const;

 private:
  ModeSystem(CMatrix h, RMatrix v);

  CMatrix h_;
  RMatrix v_;
};

}  // namespace mflab
