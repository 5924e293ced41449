#pragma once

#include <iosfwd>
#include <limits>

#include "mspar/common.hpp"

namespace mspar {

struct CsrMatrix {
  int rows = 0, cols = 0;
  std::vector<std::int32_t> row_ptr;  // size rows+1
  std::vector<std::int32_t> col_idx;  // sorted within each row
  Vec vals;

  std::size_t nnz() const { return vals.size(); }
  void multiply(const double* x, double* y) const;  // y = A x
  Vec multiply(const Vec& x) const;
  double diagonal(int i) const;  // 0 if absent
};

class CooBuilder {
 public:
  CooBuilder(int rows, int cols) : rows_(rows), cols_(cols) {}
  void add(int r, int c, double v);
  CsrMatrix compress() const;  // duplicates summed, columns sorted

 private:
  struct Entry {
    std::int32_t r, c;
    double v;
  };
  int rows_, cols_;
  std::vector<Entry> entries_;
};

// Column-compressed storage for tall sparse basis matrices.
struct CscMatrix {
  int rows = 0, cols = 0;
  std::vector<std::int32_t> col_ptr;  // size cols+1
  std::vector<std::int32_t> row_idx;  // sorted within each column
  Vec vals;

  std::size_t nnz() const { return vals.size(); }
  void multiply(const double* coeff, double* out) const;            // out = B c
  void transpose_multiply(const double* x, double* out) const;      // out = B' x
  Vec multiply(const Vec& coeff) const;
  Vec transpose_multiply(const Vec& x) const;
  CscMatrix select_columns(const std::vector<std::int32_t>& keep) const;
};

// Symmetric band matrix, lower triangle stored by columns: entry (j+d, j)
// lives at a[j*(kd+1)+d] for 0 <= d <= kd. Column segments are contiguous,
// which lets the factorization and solves run on the axpy/dot kernels.
struct BandMatrix {
  int n = 0, kd = 0;
  Vec a;

  static BandMatrix from_csr(const CsrMatrix& m);  // lower triangle of a symmetric CSR
  double& at(int j, int d) { return a[std::size_t(j) * (kd + 1) + d]; }
  double at(int j, int d) const { return a[std::size_t(j) * (kd + 1) + d]; }
};

struct BandFactorInfo {
  bool ok = true;
  int fail_index = -1;             // first column whose pivot fell below the floor
  double min_pivot = std::numeric_limits<double>::infinity();  // min diagonal pivot seen (pre-sqrt)
  double max_diag = 0;             // max diagonal of the input
};

class BandCholesky {
 public:
  // Factors A = L L'. Columns whose pivot drops below pivot_floor_rel times the
  // largest input diagonal stop the factorization (info.ok = false).
  BandFactorInfo factor(const BandMatrix& m, double pivot_floor_rel = 0.0);
  void solve_in_place(double* b) const;
  Vec solve(const Vec& rhs) const;
  int dim() const { return n_; }
  bool valid() const { return n_ > 0; }

 private:
  int n_ = 0, kd_ = 0;
  Vec l_;
};

// Small dense symmetric matrices, column-major, used for rank analysis of
// nearly dependent basis Gram matrices and nothing performance-critical.
struct DenseMatrix {
  int n = 0;
  Vec a;  // column-major n x n

  explicit DenseMatrix(int dim = 0) : n(dim), a(std::size_t(dim) * dim, 0.0) {}
  double& at(int i, int j) { return a[std::size_t(j) * n + i]; }
  double at(int i, int j) const { return a[std::size_t(j) * n + i]; }
};

struct PivotSelection {
  std::vector<std::int32_t> permutation;  // processed order, best pivot first
  int rank = 0;                           // columns accepted before the floor
};

// Diagonal-pivoted Cholesky; stops when the best remaining pivot falls below
// rel_tol times the largest initial diagonal. permutation[0..rank) is a
// well-conditioned column subset.
PivotSelection pivoted_cholesky_rank(DenseMatrix work, double rel_tol);

DenseMatrix dense_from_csr(const CsrMatrix& m);

// 1-based "row col value" triplets, one per line, %.17g values.
void write_coo_text(std::ostream& os, const CsrMatrix& m);
void write_coo_text(std::ostream& os, const CscMatrix& m);

}  // namespace mspar
