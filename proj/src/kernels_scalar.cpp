#include "mspar/kernels.hpp"

namespace mspar::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void spmv_scalar(std::size_t rows, const std::int32_t* row_ptr,
                 const std::int32_t* col_idx, const double* vals,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      s += vals[k] * x[col_idx[k]];
    y[r] = s;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table t{dot_scalar, axpy_scalar, scal_scalar, spmv_scalar};
  return t;
}

}  // namespace mspar::kernels
