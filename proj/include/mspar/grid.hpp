#pragma once

#include <array>
#include <functional>

#include "mspar/common.hpp"

namespace mspar {

// One straight side of a neighborhood boundary. Nodes are listed by ascending
// coordinate along the side; `owns[t]` marks the nodes this side contributes
// when the four sides are merged (corners go to the smaller side index, so the
// union over sides enumerates the boundary exactly once).
struct EdgeTrace {
  std::vector<std::int32_t> nodes;  // fine-grid node ids
  std::vector<std::uint8_t> owns;
  double length = 0;
  int segments() const { return int(nodes.size()) - 1; }
};

// Union of the coarse cells whose closure contains a coarse node, stored as a
// half-open fine-cell rectangle [fx0,fx1) x [fy0,fy1).
struct Neighborhood {
  int fx0 = 0, fy0 = 0, fx1 = 0, fy1 = 0;
  std::array<EdgeTrace, 4> edges;  // south, east, north, west

  int cells_x() const { return fx1 - fx0; }
  int cells_y() const { return fy1 - fy0; }
  int nodes_x() const { return cells_x() + 1; }
  int nodes_y() const { return cells_y() + 1; }
  int node_count() const { return nodes_x() * nodes_y(); }
};

// Uniform two-level partition of the unit square: nc x nc coarse cells, each
// split into r x r fine cells. Fine nodes are numbered lexicographically
// (x fastest); the homogeneous Dirichlet boundary carries no dof.
struct TwoLevelGrid {
  int nc = 0, r = 0, n = 0;  // n = nc*r fine cells per axis
  double H = 0, h = 0;
  std::vector<std::int32_t> dof_of_node;  // (n+1)^2, -1 on the boundary
  std::vector<std::int32_t> node_of_dof;  // (n-1)^2
  std::vector<Neighborhood> neighborhoods;  // one per coarse node id

  int nodes_per_axis() const { return n + 1; }
  int node_count() const { return (n + 1) * (n + 1); }
  int node_id(int ix, int iy) const { return iy * (n + 1) + ix; }
  int node_ix(int id) const { return id % (n + 1); }
  int node_iy(int id) const { return id / (n + 1); }
  double node_x(int ix) const { return ix * h; }
  double node_y(int iy) const { return iy * h; }
  bool boundary_node(int ix, int iy) const {
    return ix == 0 || iy == 0 || ix == n || iy == n;
  }
  int interior_count() const { return (n - 1) * (n - 1); }

  int coarse_per_axis() const { return nc + 1; }
  int coarse_node_id(int cx, int cy) const { return cy * (nc + 1) + cx; }
  int coarse_node_cx(int id) const { return id % (nc + 1); }
  int coarse_node_cy(int id) const { return id / (nc + 1); }
  bool coarse_node_interior(int cx, int cy) const {
    return cx > 0 && cy > 0 && cx < nc && cy < nc;
  }
  // fine node sitting on a coarse node
  int coarse_node_fine_id(int cx, int cy) const {
    return node_id(cx * r, cy * r);
  }
  std::vector<std::int32_t> interior_coarse_nodes() const;
};

TwoLevelGrid build_grid(int nc, int r);

// Interior-dof vector of g sampled at the fine nodes; throws on non-finite
// samples, reporting the offending coordinates.
Vec nodal_interpolate(const TwoLevelGrid& grid,
                      const std::function<double(double, double)>& g);

}  // namespace mspar
