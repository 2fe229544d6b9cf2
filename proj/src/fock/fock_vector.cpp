#include "mflab/fock_vector.hpp"

#include <cmath>

#include "mflab/error.hpp"
#include "mflab/kernels.hpp"

namespace mflab {

bool same_basis(const FockBasis& a, const FockBasis& b) { return &a == &b || a == b; }

FockVector::FockVector(BasisPtr basis) : basis_(std::move(basis)) {
  if (!basis_) throw ContractError("FockVector: null basis");
  coeffs_ = CVector::Zero(static_cast<Eigen::Index>(basis_->size()));
}

FockVector::FockVector(BasisPtr basis, CVector coeffs) : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw ContractError("FockVector: null basis");
  if (static_cast<std::size_t>(coeffs_.size()) != basis_->size())
    throw ContractError("FockVector: coefficient length does not match basis dimension");
}

FockVector FockVector::vacuum(BasisPtr basis) {
  if (!basis->has_sector(0)) throw ContractError("FockVector::vacuum: basis has no vacuum sector");
  FockVector v(std::move(basis));
  v.coeffs_[0] = 1.0;
  return v;
}

FockVector FockVector::basis_state(BasisPtr basis, std::initializer_list<int> occ) {
  FockVector v(std::move(basis));
  v.coeffs_[static_cast<Eigen::Index>(v.basis_->index(occ))] = 1.0;
  return v;
}

cplx FockVector::at(std::initializer_list<int> occ) const { return (*this)[basis_->index(occ)]; }

double FockVector::norm2() const { return kernels::norm2(span()); }
double FockVector::norm() const { return std::sqrt(norm2()); }

void FockVector::require_same_basis(const FockVector& o) const {
  if (!same_basis(*basis_, *o.basis_))
    throw ContractError("FockVector: basis mismatch (" + basis_->sector().to_string() + " vs " +
                        o.basis_->sector().to_string() + ")");
}

cplx FockVector::dot(const FockVector& other) const {
  require_same_basis(other);
  return kernels::dotc(span(), other.span());
}

std::vector<double> FockVector::sector_weights() const {
  std::vector<double> w;
  for (int k = basis_->min_total(); k <= basis_->max_total(); ++k) {
    const auto off = basis_->sector_offset(k);
    w.push_back(kernels::norm2(span().subspan(off, basis_->sector_size(k))));
  }
  return w;
}

FockVector& FockVector::operator+=(const FockVector& o) { return axpy(1.0, o); }
FockVector& FockVector::operator-=(const FockVector& o) { return axpy(-1.0, o); }

FockVector& FockVector::operator*=(cplx a) {
  kernels::scale(a, span());
  return *this;
}

FockVector& FockVector::axpy(cplx a, const FockVector& o) {
  require_same_basis(o);
  kernels::axpy(a, o.span(), span());
  return *this;
}

FockVector FockVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ContractError("FockVector::normalized: zero vector");
  FockVector r = *this;
  r *= 1.0 / n;
  return r;
}

FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }
FockVector operator*(cplx s, FockVector a) { return a *= s; }

FockVector extract_sector(const FockVector& v, int k) {
  const FockBasis& b = v.basis();
  if (!b.has_sector(k)) throw ContractError("extract_sector: sector " + std::to_string(k) + " not in basis");
  auto target = b.is_fixed() ? v.basis_ptr() : shared_basis(b.modes(), Sector::fixed(k));
  const auto off = static_cast<Eigen::Index>(b.sector_offset(k));
  const auto len = static_cast<Eigen::Index>(b.sector_size(k));
  return FockVector(std::move(target), v.coeffs().segment(off, len));
}

FockVector embed(const FockVector& v, BasisPtr target) {
  const FockBasis& src = v.basis();
  if (target->modes() != src.modes()) throw ContractError("embed: mode count mismatch");
  FockVector out(std::move(target));
  for (int k = src.min_total(); k <= src.max_total(); ++k) {
    const auto len = static_cast<Eigen::Index>(src.sector_size(k));
    if (len == 0) continue;
    if (!out.basis().has_sector(k)) {
      if (v.coeffs().segment(static_cast<Eigen::Index>(src.sector_offset(k)), len).squaredNorm() == 0.0) continue;
      throw ContractError("embed: target basis lacks occupied sector " + std::to_string(k));
    }
    out.coeffs().segment(static_cast<Eigen::Index>(out.basis().sector_offset(k)), len) =
        v.coeffs().segment(static_cast<Eigen::Index>(src.sector_offset(k)), len);
  }
  return out;
}

}  // namespace mflab
