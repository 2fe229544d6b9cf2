#include "mflab/sparse_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mflab/error.hpp"

namespace mflab {

SparseOperator::SparseOperator(BasisPtr basis, std::vector<Triplet> entries, bool hermitian)
    : basis_(std::move(basis)), hermitian_(hermitian) {
  const std::size_t n = basis_->size();
  if (n > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    throw CapacityError("SparseOperator: basis too large for 32-bit column indices");
  for (const auto& t : entries) {
    if (t.row >= n || t.col >= n) throw ContractError("SparseOperator: triplet index out of range");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  row_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < entries.size();) {
    std::size_t j = k;
    cplx sum = 0.0;
    while (j < entries.size() && entries[j].row == entries[k].row && entries[j].col == entries[k].col) {
      sum += entries[j].value;
      ++j;
    }
    if (sum != cplx(0.0)) {
      cols_.push_back(static_cast<std::int32_t>(entries[k].col));
      values_.push_back(sum);
      row_ptr_[entries[k].row + 1] += 1;
    }
    k = j;
  }
  for (std::size_t r = 0; r < n; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

kernels::CsrView SparseOperator::view() const {
  return {dim(), std::span<const std::int64_t>(row_ptr_), std::span<const std::int32_t>(cols_),
          std::span<const cplx>(values_)};
}

void SparseOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != dim() || y.size() != dim()) throw ContractError("SparseOperator::apply: size mismatch");
  kernels::spmv(view(), x, y);
}

FockVector SparseOperator::apply(const FockVector& v) const {
  if (!same_basis(v.basis(), *basis_)) throw ContractError("SparseOperator::apply: basis mismatch");
  FockVector out(basis_);
  apply(v.span(), out.span());
  return out;
}

CMatrix SparseOperator::to_dense() const { return dense_block(0, dim()); }

CMatrix SparseOperator::dense_block(std::size_t offset, std::size_t len) const {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len));
  for (std::size_t r = offset; r < offset + len; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto c = static_cast<std::size_t>(cols_[k]);
      if (c >= offset && c < offset + len)
        m(static_cast<Eigen::Index>(r - offset), static_cast<Eigen::Index>(c - offset)) = values_[k];
    }
  }
  return m;
}

cplx SparseOperator::entry(std::size_t row, std::size_t col) const {
  const auto first = cols_.begin() + row_ptr_[row];
  const auto last = cols_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(first, last, static_cast<std::int32_t>(col));
  if (it != last && *it == static_cast<std::int32_t>(col)) return values_[static_cast<std::size_t>(it - cols_.begin())];
  return 0.0;
}

double SparseOperator::hermiticity_defect() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < dim(); ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto c = static_cast<std::size_t>(cols_[k]);
      worst = std::max(worst, std::abs(values_[k] - std::conj(entry(c, r))));
    }
  }
  return worst;
}

bool SparseOperator::conserves_number() const {
  for (std::size_t r = 0; r < dim(); ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (basis_->total(r) != basis_->total(static_cast<std::size_t>(cols_[k]))) return false;
    }
  }
  return true;
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < dim(); ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({r, static_cast<std::size_t>(cols_[k]), values_[k]});
  }
  return t;
}

SparseOperator SparseOperator::adjoint() const {
  auto t = triplets();
  for (auto& e : t) {
    std::swap(e.row, e.col);
    e.value = std::conj(e.value);
  }
  return SparseOperator(basis_, std::move(t), hermitian_);
}

namespace {
void require_same(const SparseOperator& a, const SparseOperator& b) {
  if (!same_basis(a.basis(), b.basis())) throw ContractError("SparseOperator: basis mismatch");
}
}  // namespace

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  require_same(a, b);
  auto t = a.triplets();
  auto tb = b.triplets();
  t.insert(t.end(), tb.begin(), tb.end());
  return SparseOperator(a.basis_, std::move(t), a.hermitian_ && b.hermitian_);
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return a + (-1.0 * b); }

SparseOperator operator*(cplx s, const SparseOperator& a) {
  auto t = a.triplets();
  for (auto& e : t) e.value *= s;
  return SparseOperator(a.basis_, std::move(t), a.hermitian_ && s.imag() == 0.0);
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  require_same(a, b);
  std::vector<Triplet> t;
  std::map<std::size_t, cplx> row;
  for (std::size_t r = 0; r < a.dim(); ++r) {
    row.clear();
    for (auto k = a.row_ptr_[r]; k < a.row_ptr_[r + 1]; ++k) {
      const auto mid = static_cast<std::size_t>(a.cols_[k]);
      for (auto j = b.row_ptr_[mid]; j < b.row_ptr_[mid + 1]; ++j)
        row[static_cast<std::size_t>(b.cols_[j])] += a.values_[k] * b.values_[j];
    }
    for (const auto& [c, v] : row) t.push_back({r, c, v});
  }
  return SparseOperator(a.basis_, std::move(t), false);
}

double max_abs_difference(const SparseOperator& a, const SparseOperator& b) {
  const SparseOperator d = a - b;
  double worst = 0.0;
  for (const auto& v : d.values_) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace mflab
