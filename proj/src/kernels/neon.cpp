#include "mflab/kernels.hpp"

#if defined(__aarch64__)
#define MFLAB_HAVE_NEON_KERNELS 1
#include <arm_neon.h>
#endif

namespace mflab::kernels::detail {

#if MFLAB_HAVE_NEON_KERNELS

// One float64x2_t holds one complex double (re, im).

namespace {

inline float64x2_t cmul(float64x2_t a, float64x2_t x) {
  const float64x2_t ar = vdupq_laneq_f64(a, 0);
  const float64x2_t ai = vdupq_laneq_f64(a, 1);
  const float64x2_t xs = vextq_f64(x, x, 1);
  const float64x2_t sign = {-1.0, 1.0};
  return vfmaq_f64(vmulq_f64(ar, x), vmulq_f64(ai, xs), sign);
}

void axpy_neon(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const float64x2_t av = {a.real(), a.imag()};
  for (std::size_t i = 0; i < n; ++i) {
    vst1q_f64(yd + 2 * i, vaddq_f64(vld1q_f64(yd + 2 * i), cmul(av, vld1q_f64(xd + 2 * i))));
  }
}

cplx dotc_neon(const cplx* x, const cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  float64x2_t acc_re = vdupq_n_f64(0.0);
  float64x2_t acc_im = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t xv = vld1q_f64(xd + 2 * i);
    const float64x2_t yv = vld1q_f64(yd + 2 * i);
    acc_re = vfmaq_f64(acc_re, xv, yv);
    acc_im = vfmaq_f64(acc_im, xv, vextq_f64(yv, yv, 1));
  }
  return {vgetq_lane_f64(acc_re, 0) + vgetq_lane_f64(acc_re, 1),
          vgetq_lane_f64(acc_im, 0) - vgetq_lane_f64(acc_im, 1)};
}

double norm2_neon(const cplx* x, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t v = vld1q_f64(xd + 2 * i);
    acc = vfmaq_f64(acc, v, v);
  }
  return vaddvq_f64(acc);
}

void scale_neon(cplx a, cplx* x, std::size_t n) {
  double* xd = reinterpret_cast<double*>(x);
  const float64x2_t av = {a.real(), a.imag()};
  for (std::size_t i = 0; i < n; ++i) vst1q_f64(xd + 2 * i, cmul(av, vld1q_f64(xd + 2 * i)));
}

void spmv_neon(const CsrView& a, const cplx* x, cplx* y) {
  const double* vd = reinterpret_cast<const double*>(a.values.data());
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  for (std::size_t r = 0; r < a.rows; ++r) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (auto k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      acc = vaddq_f64(acc, cmul(vld1q_f64(vd + 2 * k), vld1q_f64(xd + 2 * a.cols[k])));
    }
    vst1q_f64(yd + 2 * r, acc);
  }
}

const KernelTable kNeonTable{Backend::neon, axpy_neon, dotc_neon, norm2_neon, scale_neon, spmv_neon};

}  // namespace

const KernelTable* neon_table() { return &kNeonTable; }

#else

const KernelTable* neon_table() { return nullptr; }

#endif

}  // namespace mflab::kernels::detail
