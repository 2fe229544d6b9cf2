#pragma once

#include <cstdint>
#include <vector>

#include "mflab/fock_vector.hpp"
#include "mflab/kernels.hpp"

namespace mflab {

struct Triplet {
  std::size_t row;
  std::size_t col;
  cplx value;
};

// Square sparse operator on one FockBasis, stored as CSR with column indices
// sorted inside each row. Duplicate triplets are summed; exact zeros dropped.
class SparseOperator {
 public:
  SparseOperator(BasisPtr basis, std::vector<Triplet> entries, bool hermitian);

  const BasisPtr& basis_ptr() const { return basis_; }
  const FockBasis& basis() const { return *basis_; }
  std::size_t dim() const { return basis_->size(); }
  std::size_t nnz() const { return values_.size(); }
  bool hermitian() const { return hermitian_; }

  FockVector apply(const FockVector& v) const;
  void apply(std::span<const cplx> x, std::span<cplx> y) const;

  kernels::CsrView view() const;
  CMatrix to_dense() const;
  // Dense block of rows/cols [offset, offset+len).
  CMatrix dense_block(std::size_t offset, std::size_t len) const;

  cplx entry(std::size_t row, std::size_t col) const;
  // max |A_ij - conj(A_ji)|
  double hermiticity_defect() const;
  // True when no entry couples different particle-number sectors.
  bool conserves_number() const;

  SparseOperator adjoint() const;
  std::vector<Triplet> triplets() const;

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(cplx s, const SparseOperator& a);
  // Matrix product (sparse x sparse).
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);

  // Largest |entry| of the difference, after aligning sparsity patterns.
  friend double max_abs_difference(const SparseOperator& a, const SparseOperator& b);

 private:
  BasisPtr basis_;
  bool hermitian_;
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int32_t> cols_;
  std::vector<cplx> values_;
};

}  // namespace mflab
