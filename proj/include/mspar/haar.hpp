#pragma once

#include "mspar/common.hpp"

namespace mspar {

// L2-orthonormal Haar hierarchy on one edge of length L: the constant scaling
// function plus wavelets of levels 0..level-1, 2^level functions in total.
// Each function is piecewise constant on the 2^level dyadic cells of the edge;
// the fine segments must align with those cells.
struct EdgeWaveletBasis {
  int level = 0;
  int fine_segments = 0;
  double edge_length = 0;

  struct Provenance {
    int level;  // -1 for the scaling function
    int pos;
  };
  std::vector<Provenance> provenance;
  std::vector<Vec> cell_values;  // [function][dyadic cell]

  int count() const { return int(cell_values.size()); }
  int dyadic_cells() const { return 1 << level; }
  int segments_per_cell() const { return fine_segments / dyadic_cells(); }
};

EdgeWaveletBasis build_haar_basis(int fine_segments, double edge_length,
                                  int level);

// Exact integrals of a piecewise-linear trace (nodal values on the
// fine_segments+1 edge nodes) against every basis function.
Vec edge_inner_products(const EdgeWaveletBasis& basis, const Vec& trace_nodes);

// Nodal trace of one basis function; a node on a dyadic-cell interface takes
// the value of the lower cell.
Vec wavelet_to_fine_trace(const EdgeWaveletBasis& basis, int function);

}  // namespace mspar
