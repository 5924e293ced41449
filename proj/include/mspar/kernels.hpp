#pragma once

#include <cstddef>
#include <cstdint>

// Vector and sparse inner loops used by the assembly, band solver and time
// stepping code. A scalar reference implementation always exists; AVX2 (x86-64)
// and NEON (aarch64) variants are selected once at startup from CPU features.
// The environment variable MSPAR_KERNELS=scalar|avx2|neon overrides detection.

namespace mspar::kernels {

enum class Isa { scalar, avx2, neon };

struct Table {
  // s = sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a*x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scal)(double a, double* x, std::size_t n);
  // y = A*x for CSR (row_ptr/col_idx/vals), one value per row written
  void (*spmv)(std::size_t rows, const std::int32_t* row_ptr,
               const std::int32_t* col_idx, const double* vals, const double* x,
               double* y);
};

const char* name(Isa isa);
bool available(Isa isa);
Isa active();
const Table& table();
const Table& table_for(Isa isa);  // throws if unavailable
void force(Isa isa);              // test hook; throws if unavailable

inline double dot(const double* x, const double* y, std::size_t n) {
  return table().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  table().axpy(a, x, y, n);
}
inline void scal(double a, double* x, std::size_t n) { table().scal(a, x, n); }
inline void spmv(std::size_t rows, const std::int32_t* row_ptr,
                 const std::int32_t* col_idx, const double* vals,
                 const double* x, double* y) {
  table().spmv(rows, row_ptr, col_idx, vals, x, y);
}

}  // namespace mspar::kernels
