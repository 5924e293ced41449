#include "mspar/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace mspar::kernels {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_neon(double a, double* x, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(av, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void spmv_neon(std::size_t rows, const std::int32_t* row_ptr,
               const std::int32_t* col_idx, const double* vals, const double* x,
               double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const std::int32_t begin = row_ptr[r];
    const std::int32_t end = row_ptr[r + 1];
    float64x2_t acc = vdupq_n_f64(0.0);
    std::int32_t k = begin;
    for (; k + 2 <= end; k += 2) {
      float64x2_t xv = {x[col_idx[k]], x[col_idx[k + 1]]};
      acc = vfmaq_f64(acc, vld1q_f64(vals + k), xv);
    }
    double s = vaddvq_f64(acc);
    for (; k < end; ++k) s += vals[k] * x[col_idx[k]];
    y[r] = s;
  }
}

}  // namespace

const Table* neon_table() {
  static const Table t{dot_neon, axpy_neon, scal_neon, spmv_neon};
  return &t;
}

}  // namespace mspar::kernels

#else

namespace mspar::kernels {
const Table* neon_table() { return nullptr; }
}  // namespace mspar::kernels

#endif
