#include "mspar/fem.hpp"

#include <algorithm>
#include <cmath>

#include "mspar/kernels.hpp"

namespace mspar {

namespace {

// 2x2 Gauss rule on [0,1]^2 applied to the Q1 shape functions of a unit cell.
// Gradient products carry no h factor in 2-D; mass carries h^2.
struct ReferenceMatrices {
  ElementMatrix stiffness{};
  ElementMatrix mass{};

  ReferenceMatrices() {
    const double p = 0.5 - 0.5 / std::sqrt(3.0);
    const double q = 0.5 + 0.5 / std::sqrt(3.0);
    const double pts[2] = {p, q};
    auto shape = [](int a, double x, double y) {
      const double sx = (a == 1 || a == 3) ? x : 1.0 - x;
      const double sy = (a >= 2) ? y : 1.0 - y;
      return sx * sy;
    };
    auto grad = [](int a, double x, double y, double& gx, double& gy) {
      const double sx = (a == 1 || a == 3) ? x : 1.0 - x;
      const double sy = (a >= 2) ? y : 1.0 - y;
      const double dx = (a == 1 || a == 3) ? 1.0 : -1.0;
      const double dy = (a >= 2) ? 1.0 : -1.0;
      gx = dx * sy;
      gy = sx * dy;
    };
    for (int gx = 0; gx < 2; ++gx)
      for (int gy = 0; gy < 2; ++gy) {
        const double x = pts[gx], y = pts[gy], w = 0.25;
        for (int a = 0; a < 4; ++a) {
          double gax, gay;
          grad(a, x, y, gax, gay);
          for (int b = 0; b < 4; ++b) {
            double gbx, gby;
            grad(b, x, y, gbx, gby);
            stiffness[a][b] += w * (gax * gbx + gay * gby);
            mass[a][b] += w * shape(a, x, y) * shape(b, x, y);
          }
        }
      }
  }
};

const ReferenceMatrices& reference() {
  static const ReferenceMatrices ref;
  return ref;
}

}  // namespace

const ElementMatrix& q1_stiffness_element() { return reference().stiffness; }

ElementMatrix q1_mass_element(double h) {
  ElementMatrix m = reference().mass;
  for (auto& row : m)
    for (double& v : row) v *= h * h;
  return m;
}

CellRect full_domain(const TwoLevelGrid& grid) {
  return {0, 0, grid.n, grid.n};
}

CellRect neighborhood_rect(const Neighborhood& nb) {
  return {nb.fx0, nb.fy0, nb.fx1, nb.fy1};
}

namespace {

enum class Kind { stiffness, mass };

CsrMatrix assemble_patch(const TwoLevelGrid& grid, const CoefficientField* kappa,
                         const CellRect& rect, Kind kind) {
  require(rect.fx0 >= 0 && rect.fy0 >= 0 && rect.fx1 <= grid.n &&
              rect.fy1 <= grid.n && rect.cells_x() > 0 && rect.cells_y() > 0,
          "patch rectangle [", rect.fx0, ",", rect.fx1, ")x[", rect.fy0, ",",
          rect.fy1, ") outside the ", grid.n, "x", grid.n, " cell grid");
  if (kappa)
    require(kappa->n == grid.n, "coefficient resolution ", kappa->n,
            " does not match grid ", grid.n);
  const ElementMatrix base = (kind == Kind::stiffness)
                                 ? q1_stiffness_element()
                                 : q1_mass_element(grid.h);
  CooBuilder coo(rect.node_count(), rect.node_count());
  for (int cy = rect.fy0; cy < rect.fy1; ++cy)
    for (int cx = rect.fx0; cx < rect.fx1; ++cx) {
      const double scale =
          (kind == Kind::stiffness && kappa) ? kappa->at(cx, cy) : 1.0;
      const int local[4] = {rect.local_node(cx, cy), rect.local_node(cx + 1, cy),
                            rect.local_node(cx, cy + 1),
                            rect.local_node(cx + 1, cy + 1)};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          coo.add(local[a], local[b], scale * base[a][b]);
    }
  return coo.compress();
}

}  // namespace

CsrMatrix assemble_patch_stiffness(const TwoLevelGrid& grid,
                                   const CoefficientField& kappa,
                                   const CellRect& rect) {
  return assemble_patch(grid, &kappa, rect, Kind::stiffness);
}

CsrMatrix assemble_patch_mass(const TwoLevelGrid& grid, const CellRect& rect) {
  return assemble_patch(grid, nullptr, rect, Kind::mass);
}

MaskSplit split_by_mask(const CsrMatrix& m,
                        const std::vector<std::uint8_t>& constrained) {
  require(m.rows == m.cols, "mask split needs a square matrix");
  require(int(constrained.size()) == m.rows, "mask length ", constrained.size(),
          " does not match dimension ", m.rows);
  MaskSplit s;
  s.free_index_of.assign(m.rows, -1);
  std::vector<std::int32_t> constrained_index_of(m.rows, -1);
  for (int i = 0; i < m.rows; ++i) {
    if (constrained[i]) {
      constrained_index_of[i] = std::int32_t(s.constrained_ids.size());
      s.constrained_ids.push_back(i);
    } else {
      s.free_index_of[i] = std::int32_t(s.free_ids.size());
      s.free_ids.push_back(i);
    }
  }
  CooBuilder free_coo(int(s.free_ids.size()), int(s.free_ids.size()));
  CooBuilder coupling_coo(int(s.free_ids.size()), int(s.constrained_ids.size()));
  for (int i = 0; i < m.rows; ++i) {
    const std::int32_t fi = s.free_index_of[i];
    if (fi < 0) continue;
    for (std::int32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const int j = m.col_idx[k];
      if (s.free_index_of[j] >= 0)
        free_coo.add(fi, s.free_index_of[j], m.vals[k]);
      else
        coupling_coo.add(fi, constrained_index_of[j], m.vals[k]);
    }
  }
  s.free_block = free_coo.compress();
  s.coupling = coupling_coo.compress();
  return s;
}

namespace {

AssembledOperator assemble_global(const TwoLevelGrid& grid,
                                  const CoefficientField* kappa, Kind kind) {
  const CsrMatrix full = assemble_patch(grid, kappa, full_domain(grid), kind);
  std::vector<std::uint8_t> constrained(grid.node_count(), 0);
  for (int id = 0; id < grid.node_count(); ++id)
    constrained[id] = grid.dof_of_node[id] < 0;
  MaskSplit s = split_by_mask(full, constrained);
  // patch-local lexicographic ids coincide with global node ids on the full
  // domain, and the free list is exactly the interior dof order
  AssembledOperator op;
  op.interior = std::move(s.free_block);
  op.boundary = std::move(s.coupling);
  op.boundary_node_ids = std::move(s.constrained_ids);
  return op;
}

}  // namespace

AssembledOperator assemble_stiffness(const TwoLevelGrid& grid,
                                     const CoefficientField& kappa) {
  return assemble_global(grid, &kappa, Kind::stiffness);
}

AssembledOperator assemble_mass(const TwoLevelGrid& grid) {
  return assemble_global(grid, nullptr, Kind::mass);
}

void LinearSolveConfig::validate() const {
  require(tolerance > 0 && tolerance <= 1e-6,
          "solver tolerance must lie in (0, 1e-6], got ", tolerance);
  require(max_iterations > 0, "solver iteration budget must be positive");
}

LinearSolver::LinearSolver(const CsrMatrix& m, LinearSolveConfig cfg)
    : mat_(&m), cfg_(cfg) {
  cfg_.validate();
  require(m.rows == m.cols, "linear solver needs a square matrix");
  require(m.rows > 0, "linear solver on an empty matrix");
  if (cfg_.method == LinearSolveConfig::Method::direct) {
    BandFactorInfo info = chol_.factor(BandMatrix::from_csr(m));
    require(info.ok,
            "Cholesky factorization failed at row ", info.fail_index,
            " (pivot ", info.min_pivot, "): matrix is not positive definite");
  } else {
    inv_diag_.resize(m.rows);
    for (int i = 0; i < m.rows; ++i) {
      const double d = m.diagonal(i);
      require(d > 0, "conjugate gradients needs a positive diagonal, row ", i,
              " has ", d);
      inv_diag_[i] = 1.0 / d;
    }
  }
}

void LinearSolver::solve_in_place(Vec& rhs) const {
  require(int(rhs.size()) == mat_->rows, "solve: rhs length ", rhs.size(),
          " does not match dimension ", mat_->rows);
  if (cfg_.method == LinearSolveConfig::Method::direct) {
    chol_.solve_in_place(rhs.data());
    return;
  }
  // Jacobi-preconditioned conjugate gradients
  const CsrMatrix& A = *mat_;
  const std::size_t n = rhs.size();
  Vec x(n, 0.0), r = rhs, z(n), p(n), Ap(n);
  const double rhs_norm = std::sqrt(kernels::dot(r.data(), r.data(), n));
  if (rhs_norm == 0.0) {
    rhs = x;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag_[i] * r[i];
  p = z;
  double rz = kernels::dot(r.data(), z.data(), n);
  for (int it = 0; it < cfg_.max_iterations; ++it) {
    A.multiply(p.data(), Ap.data());
    const double alpha = rz / kernels::dot(p.data(), Ap.data(), n);
    kernels::axpy(alpha, p.data(), x.data(), n);
    kernels::axpy(-alpha, Ap.data(), r.data(), n);
    const double res = std::sqrt(kernels::dot(r.data(), r.data(), n));
    if (res <= cfg_.tolerance * rhs_norm) {
      rhs = x;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag_[i] * r[i];
    const double rz_next = kernels::dot(r.data(), z.data(), n);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  fail("conjugate gradients did not converge in ", cfg_.max_iterations,
       " iterations (relative residual ",
       std::sqrt(kernels::dot(r.data(), r.data(), n)) / rhs_norm, ")");
}

Vec LinearSolver::solve(const Vec& rhs) const {
  Vec x = rhs;
  solve_in_place(x);
  return x;
}

Vec solve(const CsrMatrix& m, const Vec& rhs, LinearSolveConfig cfg) {
  return LinearSolver(m, cfg).solve(rhs);
}

double quadratic_form(const CsrMatrix& m, const Vec& v) {
  Vec mv = m.multiply(v);
  return kernels::dot(v.data(), mv.data(), v.size());
}

double weighted_norm(const CsrMatrix& m, const Vec& v) {
  const double q = quadratic_form(m, v);
  // clamp tiny negative roundoff on PSD forms
  return std::sqrt(std::max(q, 0.0));
}

double energy_norm(const CsrMatrix& stiffness, const Vec& v) {
  return weighted_norm(stiffness, v);
}

Vec load_vector(const TwoLevelGrid& grid, const AssembledOperator& mass,
                const std::function<double(double, double)>& f) {
  Vec interior = nodal_interpolate(grid, f);
  Vec rhs = mass.interior.multiply(interior);
  Vec boundary_values(mass.boundary_node_ids.size());
  for (std::size_t b = 0; b < mass.boundary_node_ids.size(); ++b) {
    const int id = mass.boundary_node_ids[b];
    const double x = grid.node_x(grid.node_ix(id));
    const double y = grid.node_y(grid.node_iy(id));
    const double val = f(x, y);
    require(std::isfinite(val), "non-finite source sample ", val, " at (", x,
            ", ", y, ")");
    boundary_values[b] = val;
  }
  Vec coupled = mass.boundary.multiply(boundary_values);
  kernels::axpy(1.0, coupled.data(), rhs.data(), rhs.size());
  return rhs;
}

Vec l2_project_onto(const CscMatrix& basis, const CsrMatrix& mass,
                    const BandCholesky& gram_factor, const Vec& v) {
  require(basis.rows == mass.rows, "basis rows ", basis.rows,
          " do not match mass dimension ", mass.rows);
  Vec mv = mass.multiply(v);
  Vec rhs = basis.transpose_multiply(mv);
  return gram_factor.solve(rhs);
}

Vec l2_project_onto(const CscMatrix& basis, const CsrMatrix& mass, const Vec& v) {
  // assemble the Gram matrix column by column; fine for modest basis sizes
  const int cols = basis.cols;
  require(cols > 0, "projection onto an empty basis");
  CooBuilder coo(cols, cols);
  Vec dense_col(basis.rows), m_col(basis.rows);
  for (int j = 0; j < cols; ++j) {
    std::fill(dense_col.begin(), dense_col.end(), 0.0);
    for (std::int32_t k = basis.col_ptr[j]; k < basis.col_ptr[j + 1]; ++k)
      dense_col[basis.row_idx[k]] = basis.vals[k];
    mass.multiply(dense_col.data(), m_col.data());
    for (int i = 0; i < cols; ++i) {
      double s = 0.0;
      for (std::int32_t k = basis.col_ptr[i]; k < basis.col_ptr[i + 1]; ++k)
        s += basis.vals[k] * m_col[basis.row_idx[k]];
      if (s != 0.0 || i == j) coo.add(i, j, s);
    }
  }
  BandCholesky chol;
  BandFactorInfo info = chol.factor(BandMatrix::from_csr(coo.compress()));
  require(info.ok, "basis Gram matrix is numerically singular at column ",
          info.fail_index);
  return l2_project_onto(basis, mass, chol, v);
}

}  // namespace mspar
