#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "mspar/fem.hpp"
#include "mspar/haar.hpp"

namespace mspar {

// Partition of unity: for every coarse node, the coefficient-harmonic
// extension of its affine nodal data, stored over the nodes of its
// neighborhood rectangle (row-major, x fastest).
std::vector<Vec> build_pou(const TwoLevelGrid& grid,
                           const CoefficientField& kappa,
                           LinearSolveConfig solver = {});

// Per-fine-cell weight H^2 * kappa * sum_i |grad chi_i|^2, gradients averaged
// over each cell by 2x2 Gauss quadrature.
Vec build_weighted_kappa(const TwoLevelGrid& grid, const CoefficientField& kappa,
                         const std::vector<Vec>& pou);

// Coefficient-harmonic extension of boundary data into one neighborhood:
// rect_values carries the Dirichlet data on the rectangle boundary (interior
// entries ignored); the returned rectangle holds the extension.
Vec harmonic_extend(const TwoLevelGrid& grid, const CoefficientField& kappa,
                    const Neighborhood& nb, const Vec& rect_values,
                    LinearSolveConfig solver = {});

// Neumann problem on one neighborhood: source kappa_tilde normalized to unit
// mass, constant boundary flux of total -1, mean-zero gauge. Returns nullopt
// when kappa_tilde vanishes on the whole neighborhood.
std::optional<Vec> solve_source_function(const TwoLevelGrid& grid,
                                         const CoefficientField& kappa,
                                         const Neighborhood& nb,
                                         const Vec& kappa_tilde,
                                         LinearSolveConfig solver = {});

struct MultiscaleOptions {
  int level = 0;                 // wavelets per edge: 2^level
  double drop_tolerance = 1e-10; // pivot floor for dependent-column removal
  LinearSolveConfig local_solver = {};
};

struct ColumnInfo {
  std::int32_t coarse_node = -1;
  std::int8_t edge = -1;   // 0..3, -1 for the source column
  std::int16_t function = -1;
  bool source = false;
};

// The reduced space: one block of columns per interior coarse node (four
// edges of wavelet lifts, then the source lift), each multiplied by the
// node's partition-of-unity function. Holds references to the grid,
// coefficient and fine operators passed at assembly; they must outlive it.
class MultiscaleSpace {
 public:
  const TwoLevelGrid& grid() const { return *grid_; }
  const CoefficientField& kappa() const { return *kappa_; }
  const AssembledOperator& mass_operator() const { return *mass_; }
  const AssembledOperator& stiffness_operator() const { return *stiffness_; }
  int level() const { return options_.level; }
  int dim() const { return basis_.cols; }

  const CscMatrix& basis() const { return basis_; }
  const std::vector<ColumnInfo>& columns() const { return columns_; }
  const std::vector<std::int32_t>& dropped_columns() const { return dropped_; }
  const std::vector<std::int32_t>& skipped_source_nodes() const {
    return skipped_sources_;
  }
  const std::vector<Vec>& pou() const { return pou_; }
  const Vec& weighted_kappa() const { return weighted_kappa_; }
  const CsrMatrix& reduced_mass() const { return reduced_mass_; }
  const CsrMatrix& reduced_stiffness() const { return reduced_stiffness_; }

  Vec reconstruct(const Vec& coeff) const;           // fine field of basis*coeff
  Vec project_l2(const Vec& fine) const;             // M-orthogonal coefficients
  const BandCholesky& mass_factor() const { return mass_factor_; }
  // factorization of (reduced_mass + c * reduced_stiffness), built once per
  // shift and shared; safe to call concurrently
  const BandCholesky& shifted_factor(double c) const;

 private:
  friend MultiscaleSpace assemble_multiscale_space(const TwoLevelGrid&,
                                                   const CoefficientField&,
                                                   const AssembledOperator&,
                                                   const AssembledOperator&,
                                                   MultiscaleOptions);
  const TwoLevelGrid* grid_ = nullptr;
  const CoefficientField* kappa_ = nullptr;
  const AssembledOperator* mass_ = nullptr;
  const AssembledOperator* stiffness_ = nullptr;
  MultiscaleOptions options_;
  std::vector<Vec> pou_;
  Vec weighted_kappa_;
  CscMatrix basis_;
  std::vector<ColumnInfo> columns_;
  std::vector<std::int32_t> dropped_;
  std::vector<std::int32_t> skipped_sources_;
  CsrMatrix reduced_mass_, reduced_stiffness_;
  BandCholesky mass_factor_;
  // behind a pointer so the space stays movable
  mutable std::unique_ptr<std::mutex> shift_mutex_ =
      std::make_unique<std::mutex>();
  mutable std::map<double, std::shared_ptr<const BandCholesky>> shift_cache_;
};

MultiscaleSpace assemble_multiscale_space(const TwoLevelGrid& grid,
                                          const CoefficientField& kappa,
                                          const AssembledOperator& mass,
                                          const AssembledOperator& stiffness,
                                          MultiscaleOptions options);

// Wavelet-filtered interpolation: per coarse node, project the edge traces of
// v onto the Haar hierarchy, extend harmonically, blend with the partition of
// unity. v is an interior-dof vector (zero on the domain boundary) and so is
// the result. By default the sum runs over all coarse nodes (the partition of
// unity is complete and the approximation rates hold); with
// interior_nodes_only the sum is restricted to the nodes that own basis
// columns, which makes the result an exact member of span(basis).
Vec trace_projection(const MultiscaleSpace& space, const Vec& fine_interior,
                     bool interior_nodes_only = false);

// Reduced coefficients read off the edge traces of a fine field (wavelet
// columns get their trace inner products, source columns zero).
Vec coefficients_from_traces(const MultiscaleSpace& space,
                             const Vec& fine_interior);

// chi_i (or any rectangle field) written as a full-grid row-major text block.
void write_grid_field(std::ostream& os, const TwoLevelGrid& grid,
                      const Vec& interior,
                      const double* boundary_value = nullptr);
void write_pou_field(std::ostream& os, const TwoLevelGrid& grid,
                     const Neighborhood& nb, const Vec& rect_values);

}  // namespace mspar
