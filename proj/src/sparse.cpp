#include "mspar/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mspar/kernels.hpp"
#include "mspar/util.hpp"

namespace mspar {

void CsrMatrix::multiply(const double* x, double* y) const {
  kernels::spmv(std::size_t(rows), row_ptr.data(), col_idx.data(), vals.data(),
                x, y);
}

Vec CsrMatrix::multiply(const Vec& x) const {
  require(int(x.size()) == cols, "spmv: vector length ", x.size(),
          " does not match matrix columns ", cols);
  Vec y(rows);
  multiply(x.data(), y.data());
  return y;
}

double CsrMatrix::diagonal(int i) const {
  for (std::int32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col_idx[k] == i) return vals[k];
  return 0.0;
}

void CooBuilder::add(int r, int c, double v) {
  require(r >= 0 && r < rows_ && c >= 0 && c < cols_,
          "triplet (", r, ",", c, ") outside ", rows_, "x", cols_, " matrix");
  entries_.push_back({std::int32_t(r), std::int32_t(c), v});
}

CsrMatrix CooBuilder::compress() const {
  std::vector<Entry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });
  CsrMatrix m;
  m.rows = rows_;
  m.cols = cols_;
  m.row_ptr.assign(rows_ + 1, 0);
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < sorted.size() && sorted[j].r == sorted[i].r &&
           sorted[j].c == sorted[i].c) {
      sum += sorted[j].v;
      ++j;
    }
    m.col_idx.push_back(sorted[i].c);
    m.vals.push_back(sum);
    ++m.row_ptr[sorted[i].r + 1];
    i = j;
  }
  for (int r = 0; r < rows_; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

void CscMatrix::multiply(const double* coeff, double* out) const {
  std::fill(out, out + rows, 0.0);
  for (int j = 0; j < cols; ++j) {
    const double c = coeff[j];
    if (c == 0.0) continue;
    for (std::int32_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k)
      out[row_idx[k]] += c * vals[k];
  }
}

void CscMatrix::transpose_multiply(const double* x, double* out) const {
  for (int j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::int32_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k)
      s += vals[k] * x[row_idx[k]];
    out[j] = s;
  }
}

Vec CscMatrix::multiply(const Vec& coeff) const {
  require(int(coeff.size()) == cols, "basis multiply: coefficient length ",
          coeff.size(), " does not match column count ", cols);
  Vec y(rows);
  multiply(coeff.data(), y.data());
  return y;
}

Vec CscMatrix::transpose_multiply(const Vec& x) const {
  require(int(x.size()) == rows, "basis transpose multiply: vector length ",
          x.size(), " does not match row count ", rows);
  Vec y(cols);
  transpose_multiply(x.data(), y.data());
  return y;
}

CscMatrix CscMatrix::select_columns(const std::vector<std::int32_t>& keep) const {
  CscMatrix out;
  out.rows = rows;
  out.cols = int(keep.size());
  out.col_ptr.assign(keep.size() + 1, 0);
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const std::int32_t c = keep[j];
    require(c >= 0 && c < cols, "select_columns: column ", c, " out of range");
    out.col_ptr[j + 1] =
        out.col_ptr[j] + (col_ptr[c + 1] - col_ptr[c]);
  }
  out.row_idx.resize(out.col_ptr.back());
  out.vals.resize(out.col_ptr.back());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const std::int32_t c = keep[j];
    std::copy(row_idx.begin() + col_ptr[c], row_idx.begin() + col_ptr[c + 1],
              out.row_idx.begin() + out.col_ptr[j]);
    std::copy(vals.begin() + col_ptr[c], vals.begin() + col_ptr[c + 1],
              out.vals.begin() + out.col_ptr[j]);
  }
  return out;
}

BandMatrix BandMatrix::from_csr(const CsrMatrix& m) {
  require(m.rows == m.cols, "band conversion needs a square matrix, got ",
          m.rows, "x", m.cols);
  int kd = 0;
  for (int i = 0; i < m.rows; ++i)
    for (std::int32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      if (m.col_idx[k] <= i) kd = std::max(kd, i - m.col_idx[k]);
  BandMatrix b;
  b.n = m.rows;
  b.kd = kd;
  b.a.assign(std::size_t(b.n) * (kd + 1), 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (std::int32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const int j = m.col_idx[k];
      if (j <= i) b.at(j, i - j) = m.vals[k];
    }
  return b;
}

BandFactorInfo BandCholesky::factor(const BandMatrix& m, double pivot_floor_rel) {
  n_ = m.n;
  kd_ = m.kd;
  l_ = m.a;
  const int w = kd_ + 1;
  BandFactorInfo info;
  for (int j = 0; j < n_; ++j) info.max_diag = std::max(info.max_diag, m.at(j, 0));
  const double floor = pivot_floor_rel * info.max_diag;
  for (int j = 0; j < n_; ++j) {
    double* col = l_.data() + std::size_t(j) * w;
    const double pivot = col[0];
    info.min_pivot = std::min(info.min_pivot, pivot);
    if (!(pivot > floor) || !(pivot > 0.0)) {
      info.ok = false;
      info.fail_index = j;
      n_ = 0;  // factorization unusable
      return info;
    }
    const double ljj = std::sqrt(pivot);
    col[0] = ljj;
    const int m_len = std::min(kd_, n_ - 1 - j);  // entries below the diagonal
    kernels::scal(1.0 / ljj, col + 1, std::size_t(m_len));
    for (int k = 1; k <= m_len; ++k) {
      // column j+k loses the outer-product contribution of column j
      double* target = l_.data() + std::size_t(j + k) * w;
      kernels::axpy(-col[k], col + k, target, std::size_t(m_len - k + 1));
    }
  }
  return info;
}

void BandCholesky::solve_in_place(double* b) const {
  require(valid(), "band solve on an empty or failed factorization");
  const int w = kd_ + 1;
  for (int j = 0; j < n_; ++j) {
    const double* col = l_.data() + std::size_t(j) * w;
    b[j] /= col[0];
    const int m_len = std::min(kd_, n_ - 1 - j);
    kernels::axpy(-b[j], col + 1, b + j + 1, std::size_t(m_len));
  }
  for (int j = n_ - 1; j >= 0; --j) {
    const double* col = l_.data() + std::size_t(j) * w;
    const int m_len = std::min(kd_, n_ - 1 - j);
    b[j] = (b[j] - kernels::dot(col + 1, b + j + 1, std::size_t(m_len))) / col[0];
  }
}

Vec BandCholesky::solve(const Vec& rhs) const {
  require(int(rhs.size()) == n_, "band solve: rhs length ", rhs.size(),
          " does not match dimension ", n_);
  Vec x = rhs;
  solve_in_place(x.data());
  return x;
}

PivotSelection pivoted_cholesky_rank(DenseMatrix work, double rel_tol) {
  const int n = work.n;
  PivotSelection sel;
  sel.permutation.resize(n);
  for (int i = 0; i < n; ++i) sel.permutation[i] = i;
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, work.at(i, i));
  const double floor = rel_tol * max_diag;
  auto swap_sym = [&](int p, int q) {
    if (p == q) return;
    std::swap(sel.permutation[p], sel.permutation[q]);
    for (int i = 0; i < n; ++i) std::swap(work.at(i, p), work.at(i, q));
    for (int j = 0; j < n; ++j) std::swap(work.at(p, j), work.at(q, j));
  };
  for (int j = 0; j < n; ++j) {
    int best = j;
    for (int i = j + 1; i < n; ++i)
      if (work.at(i, i) > work.at(best, best)) best = i;
    swap_sym(j, best);
    const double pivot = work.at(j, j);
    if (!(pivot > floor) || !(pivot > 0.0)) break;
    sel.rank = j + 1;
    const double ljj = std::sqrt(pivot);
    work.at(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) work.at(i, j) /= ljj;
    // keep the whole trailing block symmetric so later row/column swaps stay valid
    for (int c = j + 1; c < n; ++c) {
      const double f = work.at(c, j);
      if (f == 0.0) continue;
      kernels::axpy(-f, &work.a[std::size_t(j) * n + j + 1],
                    &work.a[std::size_t(c) * n + j + 1], std::size_t(n - 1 - j));
    }
  }
  return sel;
}

DenseMatrix dense_from_csr(const CsrMatrix& m) {
  require(m.rows == m.cols, "dense conversion needs a square matrix");
  DenseMatrix d(m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (std::int32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      d.at(i, m.col_idx[k]) = m.vals[k];
  return d;
}

void write_coo_text(std::ostream& os, const CsrMatrix& m) {
  os << m.rows << " " << m.cols << " " << m.nnz() << "\n";
  for (int i = 0; i < m.rows; ++i)
    for (std::int32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      os << (i + 1) << " " << (m.col_idx[k] + 1) << " "
         << format_double(m.vals[k]) << "\n";
}

void write_coo_text(std::ostream& os, const CscMatrix& m) {
  os << m.rows << " " << m.cols << " " << m.nnz() << "\n";
  for (int j = 0; j < m.cols; ++j)
    for (std::int32_t k = m.col_ptr[j]; k < m.col_ptr[j + 1]; ++k)
      os << (m.row_idx[k] + 1) << " " << (j + 1) << " "
         << format_double(m.vals[k]) << "\n";
}

}  // namespace mspar
