#include "mspar/msfem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "mspar/kernels.hpp"
#include "mspar/util.hpp"

namespace mspar {

namespace {

int rect_nodes_x(const Neighborhood& nb) { return nb.nodes_x(); }

int rect_local_node(const Neighborhood& nb, const TwoLevelGrid& g, int node_id) {
  const int ix = g.node_ix(node_id), iy = g.node_iy(node_id);
  return (iy - nb.fy0) * rect_nodes_x(nb) + (ix - nb.fx0);
}

// Dirichlet solver for one neighborhood rectangle with the rectangle boundary
// constrained; the factorization is reused across right-hand sides.
struct PatchSolver {
  CellRect rect;
  MaskSplit split;
  LinearSolver solver;

  static MaskSplit make_split(const TwoLevelGrid& grid,
                              const CoefficientField& kappa,
                              const CellRect& rect) {
    CsrMatrix full = assemble_patch_stiffness(grid, kappa, rect);
    std::vector<std::uint8_t> constrained(rect.node_count(), 0);
    for (int iy = rect.fy0; iy <= rect.fy1; ++iy)
      for (int ix = rect.fx0; ix <= rect.fx1; ++ix)
        if (rect.on_rect_boundary(ix, iy))
          constrained[rect.local_node(ix, iy)] = 1;
    return split_by_mask(full, constrained);
  }

  PatchSolver(const TwoLevelGrid& grid, const CoefficientField& kappa,
              const CellRect& r, const LinearSolveConfig& cfg)
      : rect(r), split(make_split(grid, kappa, r)), solver(split.free_block, cfg) {}

  // rect_values: boundary entries are Dirichlet data, interior ignored
  Vec extend(const Vec& rect_values) const {
    Vec boundary(split.constrained_ids.size());
    for (std::size_t b = 0; b < split.constrained_ids.size(); ++b)
      boundary[b] = rect_values[split.constrained_ids[b]];
    Vec rhs = split.coupling.multiply(boundary);
    kernels::scal(-1.0, rhs.data(), rhs.size());
    Vec interior = solver.solve(rhs);
    Vec out(rect_values.size());
    for (std::size_t b = 0; b < split.constrained_ids.size(); ++b)
      out[split.constrained_ids[b]] = boundary[b];
    for (std::size_t i = 0; i < split.free_ids.size(); ++i)
      out[split.free_ids[i]] = interior[i];
    return out;
  }
};

double corner_hat(int fine_index, int corner_fine_index, int r) {
  return 1.0 - double(std::abs(fine_index - corner_fine_index)) / r;
}

}  // namespace

std::vector<Vec> build_pou(const TwoLevelGrid& grid,
                           const CoefficientField& kappa,
                           LinearSolveConfig solver_cfg) {
  require(kappa.n == grid.n, "coefficient resolution ", kappa.n,
          " does not match grid ", grid.n);
  std::vector<Vec> chi(grid.neighborhoods.size());
  for (std::size_t i = 0; i < chi.size(); ++i)
    chi[i].assign(grid.neighborhoods[i].node_count(), 0.0);

  for (int ky = 0; ky < grid.nc; ++ky)
    for (int kx = 0; kx < grid.nc; ++kx) {
      const CellRect cell{kx * grid.r, ky * grid.r, (kx + 1) * grid.r,
                          (ky + 1) * grid.r};
      PatchSolver ps(grid, kappa, cell, solver_cfg);
      for (int corner = 0; corner < 4; ++corner) {
        const int cx = kx + (corner & 1), cy = ky + (corner >> 1);
        Vec data(cell.node_count(), 0.0);
        for (int iy = cell.fy0; iy <= cell.fy1; ++iy)
          for (int ix = cell.fx0; ix <= cell.fx1; ++ix)
            if (cell.on_rect_boundary(ix, iy))
              data[cell.local_node(ix, iy)] =
                  corner_hat(ix, cx * grid.r, grid.r) *
                  corner_hat(iy, cy * grid.r, grid.r);
        Vec values = ps.extend(data);
        // copy the cell block into the corner node's neighborhood rectangle
        const Neighborhood& nb = grid.neighborhoods[grid.coarse_node_id(cx, cy)];
        Vec& target = chi[grid.coarse_node_id(cx, cy)];
        for (int iy = cell.fy0; iy <= cell.fy1; ++iy)
          for (int ix = cell.fx0; ix <= cell.fx1; ++ix)
            target[(iy - nb.fy0) * nb.nodes_x() + (ix - nb.fx0)] =
                values[cell.local_node(ix, iy)];
      }
    }
  return chi;
}

Vec build_weighted_kappa(const TwoLevelGrid& grid, const CoefficientField& kappa,
                         const std::vector<Vec>& pou) {
  require(kappa.n == grid.n, "coefficient resolution ", kappa.n,
          " does not match grid ", grid.n);
  require(pou.size() == grid.neighborhoods.size(),
          "partition of unity has ", pou.size(), " fields, expected ",
          grid.neighborhoods.size());
  Vec weighted(std::size_t(grid.n) * grid.n, 0.0);
  const double h = grid.h;
  for (int ky = 0; ky < grid.nc; ++ky)
    for (int kx = 0; kx < grid.nc; ++kx)
      for (int corner = 0; corner < 4; ++corner) {
        const int cx = kx + (corner & 1), cy = ky + (corner >> 1);
        const int node = grid.coarse_node_id(cx, cy);
        const Neighborhood& nb = grid.neighborhoods[node];
        const Vec& chi = pou[node];
        for (int fy = ky * grid.r; fy < (ky + 1) * grid.r; ++fy)
          for (int fx = kx * grid.r; fx < (kx + 1) * grid.r; ++fx) {
            auto local = [&](int ix, int iy) {
              return chi[(iy - nb.fy0) * nb.nodes_x() + (ix - nb.fx0)];
            };
            const double c00 = local(fx, fy), c10 = local(fx + 1, fy);
            const double c01 = local(fx, fy + 1), c11 = local(fx + 1, fy + 1);
            // exact cell average of |grad|^2 of the bilinear interpolant
            const double a = (c10 - c00) / h, b = (c11 - c01 - c10 + c00) / h;
            const double c = (c01 - c00) / h;
            const double gx = a * a + a * b + b * b / 3.0;
            const double gy = c * c + c * b + b * b / 3.0;
            weighted[std::size_t(fy) * grid.n + fx] +=
                grid.H * grid.H * kappa.at(fx, fy) * (gx + gy);
          }
      }
  return weighted;
}

Vec harmonic_extend(const TwoLevelGrid& grid, const CoefficientField& kappa,
                    const Neighborhood& nb, const Vec& rect_values,
                    LinearSolveConfig solver_cfg) {
  require(int(rect_values.size()) == nb.node_count(),
          "rect data has ", rect_values.size(), " values, expected ",
          nb.node_count());
  PatchSolver ps(grid, kappa, neighborhood_rect(nb), solver_cfg);
  return ps.extend(rect_values);
}

std::optional<Vec> solve_source_function(const TwoLevelGrid& grid,
                                         const CoefficientField& kappa,
                                         const Neighborhood& nb,
                                         const Vec& kappa_tilde,
                                         LinearSolveConfig solver_cfg) {
  require(kappa_tilde.size() == std::size_t(grid.n) * grid.n,
          "weighted coefficient has ", kappa_tilde.size(), " cells, expected ",
          std::size_t(grid.n) * grid.n);
  const CellRect rect = neighborhood_rect(nb);
  const double h = grid.h;
  double integral = 0.0;
  for (int fy = rect.fy0; fy < rect.fy1; ++fy)
    for (int fx = rect.fx0; fx < rect.fx1; ++fx)
      integral += kappa_tilde[std::size_t(fy) * grid.n + fx] * h * h;
  if (!(integral > 0.0)) return std::nullopt;

  Vec rhs(rect.node_count(), 0.0);
  for (int fy = rect.fy0; fy < rect.fy1; ++fy)
    for (int fx = rect.fx0; fx < rect.fx1; ++fx) {
      const double w =
          kappa_tilde[std::size_t(fy) * grid.n + fx] / integral * h * h / 4.0;
      rhs[rect.local_node(fx, fy)] += w;
      rhs[rect.local_node(fx + 1, fy)] += w;
      rhs[rect.local_node(fx, fy + 1)] += w;
      rhs[rect.local_node(fx + 1, fy + 1)] += w;
    }
  // uniform outflow: every boundary node integrates its hat to h along the
  // closed polygon, total flux -1
  const double perimeter = 2.0 * (rect.cells_x() + rect.cells_y()) * h;
  for (int iy = rect.fy0; iy <= rect.fy1; ++iy)
    for (int ix = rect.fx0; ix <= rect.fx1; ++ix)
      if (rect.on_rect_boundary(ix, iy))
        rhs[rect.local_node(ix, iy)] -= h / perimeter;

  CsrMatrix full = assemble_patch_stiffness(grid, kappa, rect);
  std::vector<std::uint8_t> pinned(rect.node_count(), 0);
  pinned[0] = 1;  // gauge: fix one node, then shift to mean zero
  MaskSplit split = split_by_mask(full, pinned);
  Vec rhs_free(split.free_ids.size());
  for (std::size_t i = 0; i < split.free_ids.size(); ++i)
    rhs_free[i] = rhs[split.free_ids[i]];
  Vec x_free = solve(split.free_block, rhs_free, solver_cfg);
  Vec out(rect.node_count(), 0.0);
  for (std::size_t i = 0; i < split.free_ids.size(); ++i)
    out[split.free_ids[i]] = x_free[i];

  CsrMatrix patch_mass = assemble_patch_mass(grid, rect);
  Vec ones(rect.node_count(), 1.0);
  Vec m_ones = patch_mass.multiply(ones);
  const double mean = kernels::dot(out.data(), m_ones.data(), out.size()) /
                      kernels::dot(ones.data(), m_ones.data(), ones.size());
  for (double& v : out) v -= mean;
  return out;
}

namespace {

// shared basis per segment count (all edges with equal segments have equal
// length on a uniform grid)
struct BasisCache {
  int level;
  std::map<int, EdgeWaveletBasis> by_segments;

  const EdgeWaveletBasis& get(const EdgeTrace& edge) {
    auto it = by_segments.find(edge.segments());
    if (it == by_segments.end())
      it = by_segments
               .emplace(edge.segments(),
                        build_haar_basis(edge.segments(), edge.length, level))
               .first;
    return it->second;
  }
};

// gather the nodal trace of an interior-dof field along an edge (domain
// boundary nodes read zero)
Vec gather_trace(const TwoLevelGrid& grid, const EdgeTrace& edge,
                 const Vec& fine_interior) {
  Vec trace(edge.nodes.size());
  for (std::size_t t = 0; t < edge.nodes.size(); ++t) {
    const std::int32_t dof = grid.dof_of_node[edge.nodes[t]];
    trace[t] = dof >= 0 ? fine_interior[dof] : 0.0;
  }
  return trace;
}

struct ColumnAccumulator {
  std::vector<std::int32_t> node_begin;  // column range per coarse node
  std::vector<std::int32_t> node_end;
  std::vector<ColumnInfo> info;
  CscMatrix basis;

  explicit ColumnAccumulator(const TwoLevelGrid& grid, int fine_dim) {
    node_begin.assign(grid.neighborhoods.size(), 0);
    node_end.assign(grid.neighborhoods.size(), 0);
    basis.rows = fine_dim;
    basis.col_ptr.push_back(0);
  }

  void push_column(const ColumnInfo& ci, const std::vector<std::int32_t>& rows,
                   const Vec& vals) {
    info.push_back(ci);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      basis.row_idx.push_back(rows[k]);
      basis.vals.push_back(vals[k]);
    }
    basis.col_ptr.push_back(std::int32_t(basis.row_idx.size()));
    basis.cols = int(info.size());
  }
};

// columns of nodes in the 3x3 coarse-node block around each column's owner
// are the only candidates for a nonzero product
CsrMatrix reduced_operator(const CsrMatrix& fine_op, const CscMatrix& phi,
                           const TwoLevelGrid& grid,
                           const std::vector<ColumnInfo>& info,
                           const std::vector<std::int32_t>& node_begin,
                           const std::vector<std::int32_t>& node_end) {
  CooBuilder coo(phi.cols, phi.cols);
  Vec scratch(fine_op.rows, 0.0);
  std::vector<std::int32_t> touched;
  for (int j = 0; j < phi.cols; ++j) {
    // scratch = fine_op * phi_j via symmetric row scatter
    for (std::int32_t k = phi.col_ptr[j]; k < phi.col_ptr[j + 1]; ++k) {
      const std::int32_t row = phi.row_idx[k];
      const double v = phi.vals[k];
      for (std::int32_t a = fine_op.row_ptr[row]; a < fine_op.row_ptr[row + 1];
           ++a) {
        if (scratch[fine_op.col_idx[a]] == 0.0)
          touched.push_back(fine_op.col_idx[a]);
        scratch[fine_op.col_idx[a]] += v * fine_op.vals[a];
      }
    }
    const int cn = info[j].coarse_node;
    const int cx = grid.coarse_node_cx(cn), cy = grid.coarse_node_cy(cn);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = cx + dx, ny = cy + dy;
        if (nx < 0 || ny < 0 || nx > grid.nc || ny > grid.nc) continue;
        const int other = grid.coarse_node_id(nx, ny);
        for (std::int32_t k = node_begin[other]; k < node_end[other]; ++k) {
          if (k > j) continue;
          double s = 0.0;
          for (std::int32_t a = phi.col_ptr[k]; a < phi.col_ptr[k + 1]; ++a)
            s += phi.vals[a] * scratch[phi.row_idx[a]];
          coo.add(j, k, s);
          if (k != j) coo.add(k, j, s);
        }
      }
    for (std::int32_t t : touched) scratch[t] = 0.0;
    touched.clear();
  }
  return coo.compress();
}

}  // namespace

MultiscaleSpace assemble_multiscale_space(const TwoLevelGrid& grid,
                                          const CoefficientField& kappa,
                                          const AssembledOperator& mass,
                                          const AssembledOperator& stiffness,
                                          MultiscaleOptions options) {
  require(kappa.n == grid.n, "coefficient resolution ", kappa.n,
          " does not match grid ", grid.n);
  require(mass.dim() == grid.interior_count() &&
              stiffness.dim() == grid.interior_count(),
          "operator dimensions do not match the grid interior");
  require(options.level >= 0, "wavelet level must be non-negative");
  require(options.drop_tolerance >= 0 && options.drop_tolerance <= 1e-2,
          "drop tolerance must lie in [0, 1e-2], got ", options.drop_tolerance);
  options.local_solver.validate();

  MultiscaleSpace space;
  space.grid_ = &grid;
  space.kappa_ = &kappa;
  space.mass_ = &mass;
  space.stiffness_ = &stiffness;
  space.options_ = options;
  space.pou_ = build_pou(grid, kappa, options.local_solver);
  space.weighted_kappa_ = build_weighted_kappa(grid, kappa, space.pou_);

  BasisCache bases{options.level, {}};
  ColumnAccumulator acc(grid, grid.interior_count());

  std::vector<std::int32_t> rows;
  Vec vals;
  for (int cy = 0; cy <= grid.nc; ++cy)
    for (int cx = 0; cx <= grid.nc; ++cx) {
      const int node = grid.coarse_node_id(cx, cy);
      acc.node_begin[node] = std::int32_t(acc.info.size());
      if (!grid.coarse_node_interior(cx, cy)) {
        acc.node_end[node] = acc.node_begin[node];
        continue;  // the boundary ring carries no reduced dofs
      }
      const Neighborhood& nb = grid.neighborhoods[node];
      const Vec& chi = space.pou_[node];
      PatchSolver ps(grid, kappa, neighborhood_rect(nb), options.local_solver);

      auto emit = [&](const Vec& rect_field, const ColumnInfo& ci) {
        rows.clear();
        vals.clear();
        for (int iy = nb.fy0 + 1; iy < nb.fy1; ++iy)
          for (int ix = nb.fx0 + 1; ix < nb.fx1; ++ix) {
            const int local = (iy - nb.fy0) * nb.nodes_x() + (ix - nb.fx0);
            const double v = chi[local] * rect_field[local];
            const std::int32_t dof = grid.dof_of_node[grid.node_id(ix, iy)];
            rows.push_back(dof);
            vals.push_back(v);
          }
        acc.push_column(ci, rows, vals);
      };

      Vec data(nb.node_count());
      for (int side = 0; side < 4; ++side) {
        const EdgeTrace& edge = nb.edges[side];
        const EdgeWaveletBasis& basis = bases.get(edge);
        for (int f = 0; f < basis.count(); ++f) {
          std::fill(data.begin(), data.end(), 0.0);
          Vec trace = wavelet_to_fine_trace(basis, f);
          for (std::size_t t = 0; t < edge.nodes.size(); ++t)
            if (edge.owns[t])
              data[rect_local_node(nb, grid, edge.nodes[t])] = trace[t];
          Vec ext = ps.extend(data);
          ColumnInfo ci;
          ci.coarse_node = node;
          ci.edge = std::int8_t(side);
          ci.function = std::int16_t(f);
          emit(ext, ci);
        }
      }
      auto source = solve_source_function(grid, kappa, nb, space.weighted_kappa_,
                                          options.local_solver);
      if (source) {
        ColumnInfo ci;
        ci.coarse_node = node;
        ci.source = true;
        emit(*source, ci);
      } else {
        space.skipped_sources_.push_back(node);
      }
      acc.node_end[node] = std::int32_t(acc.info.size());
    }

  require(acc.basis.cols > 0,
          "multiscale space is empty: no interior coarse node produced columns");

  space.basis_ = std::move(acc.basis);
  space.columns_ = std::move(acc.info);
  space.reduced_mass_ = reduced_operator(mass.interior, space.basis_, grid,
                                         space.columns_, acc.node_begin,
                                         acc.node_end);
  space.reduced_stiffness_ =
      reduced_operator(stiffness.interior, space.basis_, grid, space.columns_,
                       acc.node_begin, acc.node_end);

  BandFactorInfo info = space.mass_factor_.factor(
      BandMatrix::from_csr(space.reduced_mass_), options.drop_tolerance);
  if (!info.ok) {
    // nearly dependent columns: select a well-conditioned subset densely
    PivotSelection sel = pivoted_cholesky_rank(
        dense_from_csr(space.reduced_mass_), options.drop_tolerance);
    require(sel.rank > 0, "reduced mass matrix has no usable columns");
    std::vector<std::int32_t> keep(sel.permutation.begin(),
                                   sel.permutation.begin() + sel.rank);
    std::sort(keep.begin(), keep.end());
    std::vector<std::uint8_t> kept(space.columns_.size(), 0);
    for (std::int32_t k : keep) kept[k] = 1;
    for (std::size_t c = 0; c < kept.size(); ++c)
      if (!kept[c]) space.dropped_.push_back(std::int32_t(c));

    space.basis_ = space.basis_.select_columns(keep);
    std::vector<ColumnInfo> filtered;
    filtered.reserve(keep.size());
    for (std::int32_t k : keep) filtered.push_back(space.columns_[k]);
    space.columns_ = std::move(filtered);
    // rebuild per-node ranges over the filtered column list
    std::vector<std::int32_t> nb_begin(grid.neighborhoods.size(), 0);
    std::vector<std::int32_t> nb_end(grid.neighborhoods.size(), 0);
    int at = 0;
    for (std::size_t node = 0; node < grid.neighborhoods.size(); ++node) {
      nb_begin[node] = at;
      while (at < int(space.columns_.size()) &&
             space.columns_[at].coarse_node == std::int32_t(node))
        ++at;
      nb_end[node] = at;
    }
    space.reduced_mass_ = reduced_operator(mass.interior, space.basis_, grid,
                                           space.columns_, nb_begin, nb_end);
    space.reduced_stiffness_ = reduced_operator(
        stiffness.interior, space.basis_, grid, space.columns_, nb_begin, nb_end);
    info = space.mass_factor_.factor(BandMatrix::from_csr(space.reduced_mass_),
                                     options.drop_tolerance);
    require(info.ok,
            "reduced mass matrix is still singular after dropping ",
            space.dropped_.size(), " dependent columns");
  }
  return space;
}

Vec MultiscaleSpace::reconstruct(const Vec& coeff) const {
  return basis_.multiply(coeff);
}

Vec MultiscaleSpace::project_l2(const Vec& fine) const {
  return l2_project_onto(basis_, mass_->interior, mass_factor_, fine);
}

const BandCholesky& MultiscaleSpace::shifted_factor(double c) const {
  std::lock_guard<std::mutex> lock(*shift_mutex_);
  auto it = shift_cache_.find(c);
  if (it == shift_cache_.end()) {
    CooBuilder coo(dim(), dim());
    const CsrMatrix& m = reduced_mass_;
    const CsrMatrix& a = reduced_stiffness_;
    for (int i = 0; i < m.rows; ++i)
      for (std::int32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
        coo.add(i, m.col_idx[k], m.vals[k]);
    for (int i = 0; i < a.rows; ++i)
      for (std::int32_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
        coo.add(i, a.col_idx[k], c * a.vals[k]);
    auto chol = std::make_shared<BandCholesky>();
    BandFactorInfo info = chol->factor(BandMatrix::from_csr(coo.compress()));
    require(info.ok, "shifted reduced operator with step ", c,
            " is not positive definite (pivot failed at column ",
            info.fail_index, ")");
    it = shift_cache_.emplace(c, std::move(chol)).first;
  }
  return *it->second;
}

Vec trace_projection(const MultiscaleSpace& space, const Vec& fine_interior,
                     bool interior_nodes_only) {
  const TwoLevelGrid& grid = space.grid();
  require(int(fine_interior.size()) == grid.interior_count(),
          "field has ", fine_interior.size(), " dofs, expected ",
          grid.interior_count());
  BasisCache bases{space.level(), {}};
  Vec result(grid.interior_count(), 0.0);
  for (int cy = 0; cy <= grid.nc; ++cy)
    for (int cx = 0; cx <= grid.nc; ++cx) {
      if (interior_nodes_only &&
          (cx == 0 || cy == 0 || cx == grid.nc || cy == grid.nc))
        continue;
      const int node = grid.coarse_node_id(cx, cy);
      const Neighborhood& nb = grid.neighborhoods[node];
      Vec data(nb.node_count(), 0.0);
      for (int side = 0; side < 4; ++side) {
        const EdgeTrace& edge = nb.edges[side];
        const EdgeWaveletBasis& basis = bases.get(edge);
        const Vec coeff =
            edge_inner_products(basis, gather_trace(grid, edge, fine_interior));
        Vec recon(edge.nodes.size(), 0.0);
        for (int f = 0; f < basis.count(); ++f) {
          const Vec trace = wavelet_to_fine_trace(basis, f);
          kernels::axpy(coeff[f], trace.data(), recon.data(), recon.size());
        }
        for (std::size_t t = 0; t < edge.nodes.size(); ++t)
          if (edge.owns[t])
            data[rect_local_node(nb, grid, edge.nodes[t])] = recon[t];
      }
      Vec ext = harmonic_extend(grid, space.kappa(), nb, data);
      const Vec& chi = space.pou()[node];
      for (int iy = nb.fy0; iy <= nb.fy1; ++iy)
        for (int ix = nb.fx0; ix <= nb.fx1; ++ix) {
          const std::int32_t dof = grid.dof_of_node[grid.node_id(ix, iy)];
          if (dof < 0) continue;
          const int local = (iy - nb.fy0) * nb.nodes_x() + (ix - nb.fx0);
          result[dof] += chi[local] * ext[local];
        }
    }
  return result;
}

Vec coefficients_from_traces(const MultiscaleSpace& space,
                             const Vec& fine_interior) {
  const TwoLevelGrid& grid = space.grid();
  require(int(fine_interior.size()) == grid.interior_count(),
          "field has ", fine_interior.size(), " dofs, expected ",
          grid.interior_count());
  BasisCache bases{space.level(), {}};
  Vec coeff(space.dim(), 0.0);
  int current_node = -1, current_edge = -1;
  Vec edge_coeff;
  for (int j = 0; j < space.dim(); ++j) {
    const ColumnInfo& ci = space.columns()[j];
    if (ci.source) continue;
    if (ci.coarse_node != current_node || ci.edge != current_edge) {
      const Neighborhood& nb = grid.neighborhoods[ci.coarse_node];
      const EdgeTrace& edge = nb.edges[ci.edge];
      edge_coeff = edge_inner_products(bases.get(edge),
                                       gather_trace(grid, edge, fine_interior));
      current_node = ci.coarse_node;
      current_edge = ci.edge;
    }
    coeff[j] = edge_coeff[ci.function];
  }
  return coeff;
}

void write_grid_field(std::ostream& os, const TwoLevelGrid& grid,
                      const Vec& interior, const double* boundary_value) {
  require(int(interior.size()) == grid.interior_count(),
          "field has ", interior.size(), " dofs, expected ",
          grid.interior_count());
  const double bv = boundary_value ? *boundary_value : 0.0;
  for (int iy = 0; iy <= grid.n; ++iy) {
    for (int ix = 0; ix <= grid.n; ++ix) {
      if (ix) os << " ";
      const std::int32_t dof = grid.dof_of_node[grid.node_id(ix, iy)];
      os << format_double(dof >= 0 ? interior[dof] : bv);
    }
    os << "\n";
  }
}

void write_pou_field(std::ostream& os, const TwoLevelGrid& grid,
                     const Neighborhood& nb, const Vec& rect_values) {
  require(int(rect_values.size()) == nb.node_count(),
          "rect field has ", rect_values.size(), " values, expected ",
          nb.node_count());
  for (int iy = 0; iy <= grid.n; ++iy) {
    for (int ix = 0; ix <= grid.n; ++ix) {
      if (ix) os << " ";
      double v = 0.0;
      if (ix >= nb.fx0 && ix <= nb.fx1 && iy >= nb.fy0 && iy <= nb.fy1)
        v = rect_values[(iy - nb.fy0) * nb.nodes_x() + (ix - nb.fx0)];
      os << format_double(v);
    }
    os << "\n";
  }
}

}  // namespace mspar
