#pragma once

// Data-parallel inner loops used by the Fock-space code: complex axpy, inner
// products, squared norms and CSR sparse matrix-vector products.
//
// Every kernel has a scalar reference implementation and SIMD variants
// (AVX2+FMA on x86-64, NEON on aarch64). The active backend is chosen once at
// first use from the CPU features, and can be pinned with set_backend() or
// the MFLAB_SIMD environment variable (scalar|avx2|neon). A fixed backend
// gives bitwise reproducible results; backends agree to rounding.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace mflab::kernels {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2, neon };

// Compressed-sparse-row view. row_ptr has rows+1 entries.
struct CsrView {
  std::size_t rows = 0;
  std::span<const std::int64_t> row_ptr;
  std::span<const std::int32_t> cols;
  std::span<const cplx> values;
};

struct KernelTable {
  Backend backend;
  // y += a * x
  void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
  // sum conj(x_i) * y_i
  cplx (*dotc)(const cplx* x, const cplx* y, std::size_t n);
  // sum |x_i|^2
  double (*norm2)(const cplx* x, std::size_t n);
  // x *= a
  void (*scale)(cplx a, cplx* x, std::size_t n);
  // y = A x
  void (*spmv)(const CsrView& a, const cplx* x, cplx* y);
};

// Tables for individual backends. Returns nullptr when the backend is not
// compiled in or the CPU lacks the instructions.
const KernelTable* table_for(Backend b);
const KernelTable& scalar_table();

const KernelTable& active();
void set_backend(Backend b);
Backend detect_best();
bool available(Backend b);
std::string_view name(Backend b);
Backend parse_backend(std::string_view s);

inline void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline cplx dotc(std::span<const cplx> x, std::span<const cplx> y) {
  return active().dotc(x.data(), y.data(), x.size());
}
inline double norm2(std::span<const cplx> x) { return active().norm2(x.data(), x.size()); }
inline void scale(cplx a, std::span<cplx> x) { active().scale(a, x.data(), x.size()); }
inline void spmv(const CsrView& a, std::span<const cplx> x, std::span<cplx> y) {
  active().spmv(a, x.data(), y.data());
}

namespace detail {
// Backend entry points, defined in their own translation units.
extern const KernelTable kScalarTable;
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace mflab::kernels
