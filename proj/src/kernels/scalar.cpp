#include "mflab/kernels.hpp"

// Reference kernels. Complex products are spelled out on real/imaginary
// parts so the compiler never emits the NaN-recovery libcall of operator*.

namespace mflab::kernels {
namespace {

void axpy_scalar(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cplx(y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr);
  }
}

cplx dotc_scalar(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double norm2_scalar(const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void scale_scalar(cplx a, cplx* x, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    x[i] = cplx(ar * xr - ai * xi, ar * xi + ai * xr);
  }
}

void spmv_scalar(const CsrView& a, const cplx* x, cplx* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double re = 0.0, im = 0.0;
    for (auto k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const cplx v = a.values[k];
      const cplx xv = x[a.cols[k]];
      re += v.real() * xv.real() - v.imag() * xv.imag();
      im += v.real() * xv.imag() + v.imag() * xv.real();
    }
    y[r] = {re, im};
  }
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Backend::scalar, axpy_scalar, dotc_scalar, norm2_scalar, scale_scalar,
                               spmv_scalar};
}  // namespace detail

}  // namespace mflab::kernels
