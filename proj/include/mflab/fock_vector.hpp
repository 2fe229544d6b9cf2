#pragma once

#include <Eigen/Core>
#include <complex>
#include <span>

#include "mflab/fock_basis.hpp"

namespace mflab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Complex coefficient vector over a FockBasis.
class FockVector {
 public:
  explicit FockVector(BasisPtr basis);
  FockVector(BasisPtr basis, CVector coeffs);

  static FockVector zeros(BasisPtr basis) { return FockVector(std::move(basis)); }
  static FockVector vacuum(BasisPtr basis);
  static FockVector basis_state(BasisPtr basis, std::initializer_list<int> occ);

  const BasisPtr& basis_ptr() const { return basis_; }
  const FockBasis& basis() const { return *basis_; }
  std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }

  const CVector& coeffs() const { return coeffs_; }
  CVector& coeffs() { return coeffs_; }
  std::span<const cplx> span() const { return {coeffs_.data(), size()}; }
  std::span<cplx> span() { return {coeffs_.data(), size()}; }

  cplx operator[](std::size_t i) const { return coeffs_[static_cast<Eigen::Index>(i)]; }
  cplx& operator[](std::size_t i) { return coeffs_[static_cast<Eigen::Index>(i)]; }
  cplx at(std::initializer_list<int> occ) const;

  double norm2() const;
  double norm() const;
  // <this, other>, antilinear in this
  cplx dot(const FockVector& other) const;

  // ||P_k v||^2 for k = min_total..max_total, indexed from 0 = sector min_total
  std::vector<double> sector_weights() const;

  FockVector& operator+=(const FockVector& o);
  FockVector& operator-=(const FockVector& o);
  FockVector& operator*=(cplx a);
  // this += a * o
  FockVector& axpy(cplx a, const FockVector& o);

  FockVector normalized() const;

 private:
  void require_same_basis(const FockVector& o) const;

  BasisPtr basis_;
  CVector coeffs_;
};

FockVector operator+(FockVector a, const FockVector& b);
FockVector operator-(FockVector a, const FockVector& b);
FockVector operator*(cplx s, FockVector a);

// Same-support check used by every binary operation on FockVectors.
bool same_basis(const FockBasis& a, const FockBasis& b);

// Vector of sector k as an element of a fixed(k) basis.
FockVector extract_sector(const FockVector& v, int k);
// Embed a vector into a larger basis (its sectors must exist there).
FockVector embed(const FockVector& v, BasisPtr target);

}  // namespace mflab
