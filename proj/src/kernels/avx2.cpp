#include "mflab/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define MFLAB_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace mflab::kernels::detail {

#if MFLAB_HAVE_AVX2_KERNELS

// Complex doubles are interleaved (re, im); one __m256d holds two of them.
// Only intrinsics appear inside the target("avx2,fma") functions so no
// AVX-encoded copy of an inline library function can leak into other TUs.

namespace {

#define MFLAB_AVX2 __attribute__((target("avx2,fma")))

MFLAB_AVX2 inline __m256d cmul_bcast(__m256d ar, __m256d ai, __m256d x) {
  const __m256d xs = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

MFLAB_AVX2 void axpy_avx2(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_bcast(ar, ai, xv)));
  }
  for (; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    yd[2 * i] += a.real() * xr - a.imag() * xi;
    yd[2 * i + 1] += a.real() * xi + a.imag() * xr;
  }
}

MFLAB_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

MFLAB_AVX2 cplx dotc_avx2(const cplx* x, const cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  __m256d acc_re = _mm256_setzero_pd();  // xr*yr, xi*yi
  __m256d acc_im = _mm256_setzero_pd();  // xr*yi, xi*yr
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), acc_im);
  }
  // odd lanes of acc_im carry xi*yr, which enters with a minus sign
  const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  double re = hsum(acc_re);
  double im = hsum(_mm256_mul_pd(acc_im, sign));
  for (; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    const double yr = yd[2 * i], yi = yd[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

MFLAB_AVX2 double norm2_avx2(const cplx* x, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(xd + 2 * i);
    const __m256d b = _mm256_loadu_pd(xd + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(xd + 2 * i);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += xd[2 * i] * xd[2 * i] + xd[2 * i + 1] * xd[2 * i + 1];
  return s;
}

MFLAB_AVX2 void scale_avx2(cplx a, cplx* x, std::size_t n) {
  double* xd = reinterpret_cast<double*>(x);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(xd + 2 * i, cmul_bcast(ar, ai, _mm256_loadu_pd(xd + 2 * i)));
  }
  for (; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    xd[2 * i] = a.real() * xr - a.imag() * xi;
    xd[2 * i + 1] = a.real() * xi + a.imag() * xr;
  }
}

MFLAB_AVX2 void spmv_avx2(const CsrView& a, const cplx* x, cplx* y) {
  const double* vd = reinterpret_cast<const double*>(a.values.data());
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const std::int32_t* cols = a.cols.data();
  for (std::size_t r = 0; r < a.rows; ++r) {
    auto k = a.row_ptr[r];
    const auto end = a.row_ptr[r + 1];
    __m256d acc_a = _mm256_setzero_pd();
    __m256d acc_b = _mm256_setzero_pd();
    for (; k + 2 <= end; k += 2) {
      const __m256d v = _mm256_loadu_pd(vd + 2 * k);
      const __m256d xv = _mm256_loadu2_m128d(xd + 2 * cols[k + 1], xd + 2 * cols[k]);
      acc_a = _mm256_fmadd_pd(_mm256_movedup_pd(v), xv, acc_a);
      acc_b = _mm256_fmadd_pd(_mm256_permute_pd(v, 0xF), _mm256_permute_pd(xv, 0x5), acc_b);
    }
    const __m256d acc = _mm256_addsub_pd(acc_a, acc_b);
    __m128d s = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    if (k < end) {
      const __m128d v = _mm_loadu_pd(vd + 2 * k);
      const __m128d xv = _mm_loadu_pd(xd + 2 * cols[k]);
      const __m128d vr = _mm_movedup_pd(v);
      const __m128d vi = _mm_permute_pd(v, 0x3);
      s = _mm_add_pd(s, _mm_addsub_pd(_mm_mul_pd(vr, xv), _mm_mul_pd(vi, _mm_permute_pd(xv, 0x1))));
    }
    _mm_storeu_pd(yd + 2 * r, s);
  }
}

#undef MFLAB_AVX2

const KernelTable kAvx2Table{Backend::avx2, axpy_avx2, dotc_avx2, norm2_avx2, scale_avx2, spmv_avx2};

}  // namespace

const KernelTable* avx2_table() {
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2Table;
  return nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace mflab::kernels::detail
