#include "mspar/haar.hpp"

#include <cmath>

namespace mspar {

EdgeWaveletBasis build_haar_basis(int fine_segments, double edge_length,
                                  int level) {
  require(fine_segments >= 1, "edge needs at least one segment, got ",
          fine_segments);
  require(edge_length > 0, "edge length must be positive, got ", edge_length);
  require(level >= 0, "wavelet level must be non-negative, got ", level);
  int max_level = 0;
  while ((1 << (max_level + 1)) <= fine_segments &&
         fine_segments % (1 << (max_level + 1)) == 0)
    ++max_level;
  require(
      level <= max_level && fine_segments % (1 << level) == 0,
      "wavelet level ", level, " does not align with ", fine_segments,
      " fine segments (deepest admissible level here is ", max_level, ")");

  EdgeWaveletBasis basis;
  basis.level = level;
  basis.fine_segments = fine_segments;
  basis.edge_length = edge_length;
  const int cells = basis.dyadic_cells();

  basis.provenance.push_back({-1, 0});
  basis.cell_values.emplace_back(cells, 1.0 / std::sqrt(edge_length));
  for (int j = 0; j < level; ++j) {
    const double amplitude = std::sqrt(double(1 << j) / edge_length);
    const int span = cells >> j;  // dyadic cells under one wavelet
    for (int p = 0; p < (1 << j); ++p) {
      Vec values(cells, 0.0);
      for (int c = 0; c < span; ++c)
        values[p * span + c] = (c < span / 2) ? amplitude : -amplitude;
      basis.provenance.push_back({j, p});
      basis.cell_values.push_back(std::move(values));
    }
  }
  return basis;
}

Vec edge_inner_products(const EdgeWaveletBasis& basis, const Vec& trace_nodes) {
  require(int(trace_nodes.size()) == basis.fine_segments + 1,
          "trace has ", trace_nodes.size(), " nodes, expected ",
          basis.fine_segments + 1);
  const int per_cell = basis.segments_per_cell();
  const double h_seg = basis.edge_length / basis.fine_segments;
  Vec coeff(basis.count(), 0.0);
  for (int s = 0; s < basis.fine_segments; ++s) {
    const int cell = s / per_cell;
    const double avg = 0.5 * (trace_nodes[s] + trace_nodes[s + 1]) * h_seg;
    for (int f = 0; f < basis.count(); ++f)
      coeff[f] += basis.cell_values[f][cell] * avg;
  }
  return coeff;
}

Vec wavelet_to_fine_trace(const EdgeWaveletBasis& basis, int function) {
  require(function >= 0 && function < basis.count(), "basis function index ",
          function, " out of range [0,", basis.count(), ")");
  const int per_cell = basis.segments_per_cell();
  const Vec& values = basis.cell_values[function];
  Vec trace(basis.fine_segments + 1);
  for (int t = 0; t <= basis.fine_segments; ++t) {
    int cell = t / per_cell;
    if (t > 0 && t % per_cell == 0) --cell;  // interface nodes use the lower cell
    trace[t] = values[cell];
  }
  return trace;
}

}  // namespace mspar
