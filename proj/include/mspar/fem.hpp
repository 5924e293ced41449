#pragma once

#include <array>

#include "mspar/coefficient.hpp"
#include "mspar/sparse.hpp"

namespace mspar {

// Q1 element matrices on an h x h square cell from 2x2 Gauss quadrature
// (exact for bilinear shape functions and cell-constant coefficients).
// Local node order: (0,0), (1,0), (0,1), (1,1).
using ElementMatrix = std::array<std::array<double, 4>, 4>;
const ElementMatrix& q1_stiffness_element();  // unit coefficient; h-independent
ElementMatrix q1_mass_element(double h);

// Half-open rectangle of fine cells.
struct CellRect {
  int fx0 = 0, fy0 = 0, fx1 = 0, fy1 = 0;

  int cells_x() const { return fx1 - fx0; }
  int cells_y() const { return fy1 - fy0; }
  int nodes_x() const { return cells_x() + 1; }
  int nodes_y() const { return cells_y() + 1; }
  int node_count() const { return nodes_x() * nodes_y(); }
  // local lexicographic node id within the closed rectangle
  int local_node(int ix, int iy) const {
    return (iy - fy0) * nodes_x() + (ix - fx0);
  }
  bool on_rect_boundary(int ix, int iy) const {
    return ix == fx0 || ix == fx1 || iy == fy0 || iy == fy1;
  }
};

CellRect full_domain(const TwoLevelGrid& grid);
CellRect neighborhood_rect(const Neighborhood& nb);

// Symmetric operators over all nodes of the rectangle, no boundary handling.
CsrMatrix assemble_patch_stiffness(const TwoLevelGrid& grid,
                                   const CoefficientField& kappa,
                                   const CellRect& rect);
CsrMatrix assemble_patch_mass(const TwoLevelGrid& grid, const CellRect& rect);

// Row/column split of a symmetric matrix into the free block and the coupling
// to constrained indices.
struct MaskSplit {
  CsrMatrix free_block;      // free x free
  CsrMatrix coupling;        // free x constrained
  std::vector<std::int32_t> free_ids, constrained_ids;   // original indices
  std::vector<std::int32_t> free_index_of;               // -1 when constrained
};
MaskSplit split_by_mask(const CsrMatrix& m,
                        const std::vector<std::uint8_t>& constrained);

// Fine-grid operator after homogeneous Dirichlet elimination; the coupling
// block to boundary nodes is kept for load assembly and lifting.
struct AssembledOperator {
  CsrMatrix interior;
  CsrMatrix boundary;  // interior x boundary-node-list
  std::vector<std::int32_t> boundary_node_ids;

  int dim() const { return interior.rows; }
};

AssembledOperator assemble_stiffness(const TwoLevelGrid& grid,
                                     const CoefficientField& kappa);
AssembledOperator assemble_mass(const TwoLevelGrid& grid);

struct LinearSolveConfig {
  enum class Method { direct, conjugate_gradient };
  Method method = Method::direct;
  double tolerance = 1e-12;  // relative residual, cg only
  int max_iterations = 20000;

  void validate() const;
};

// SPD solve with a reusable factorization (direct) or Jacobi-preconditioned
// conjugate gradients. solve() is const and reentrant.
class LinearSolver {
 public:
  LinearSolver(const CsrMatrix& m, LinearSolveConfig cfg = {});
  Vec solve(const Vec& rhs) const;
  void solve_in_place(Vec& rhs) const;
  const BandCholesky& factorization() const { return chol_; }

 private:
  const CsrMatrix* mat_;
  LinearSolveConfig cfg_;
  BandCholesky chol_;
  Vec inv_diag_;
};

Vec solve(const CsrMatrix& m, const Vec& rhs, LinearSolveConfig cfg = {});

double quadratic_form(const CsrMatrix& m, const Vec& v);  // v' M v
double weighted_norm(const CsrMatrix& m, const Vec& v);   // sqrt(v' M v)
double energy_norm(const CsrMatrix& stiffness, const Vec& v);

// Interior load vector of the nodal interpolant of f: (M v_f) restricted to
// interior dofs, including the mass coupling to boundary nodal values.
Vec load_vector(const TwoLevelGrid& grid, const AssembledOperator& mass,
                const std::function<double(double, double)>& f);

// Coefficients c minimizing the M-weighted distance between v and basis*c.
Vec l2_project_onto(const CscMatrix& basis, const CsrMatrix& mass, const Vec& v);
Vec l2_project_onto(const CscMatrix& basis, const CsrMatrix& mass,
                    const BandCholesky& gram_factor, const Vec& v);

}  // namespace mspar
