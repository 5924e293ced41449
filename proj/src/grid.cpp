#include "mspar/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mspar {

namespace {

// Side order: 0 south, 1 east, 2 north, 3 west. A corner shared by two sides
// is owned by the smaller side index.
EdgeTrace make_side(const TwoLevelGrid& g, int side, int fx0, int fy0, int fx1,
                    int fy1) {
  EdgeTrace e;
  const bool horizontal = (side == 0 || side == 2);
  const int fixed = horizontal ? (side == 0 ? fy0 : fy1) : (side == 1 ? fx1 : fx0);
  const int lo = horizontal ? fx0 : fy0;
  const int hi = horizontal ? fx1 : fy1;
  e.length = (hi - lo) * g.h;
  e.nodes.reserve(hi - lo + 1);
  for (int t = lo; t <= hi; ++t)
    e.nodes.push_back(horizontal ? g.node_id(t, fixed) : g.node_id(fixed, t));
  e.owns.assign(e.nodes.size(), 1);
  // Which side also touches each endpoint of this side, in rectangle order:
  //   south: start->west, end->east;  east: start->south, end->north
  //   north: start->west, end->east;  west: start->south, end->north
  const int start_other = horizontal ? 3 : 0;
  const int end_other = horizontal ? 1 : 2;
  if (start_other < side) e.owns.front() = 0;
  if (end_other < side) e.owns.back() = 0;
  return e;
}

}  // namespace

std::vector<std::int32_t> TwoLevelGrid::interior_coarse_nodes() const {
  std::vector<std::int32_t> ids;
  for (int cy = 1; cy < nc; ++cy)
    for (int cx = 1; cx < nc; ++cx)
      ids.push_back(coarse_node_id(cx, cy));
  return ids;
}

TwoLevelGrid build_grid(int nc, int r) {
  require(nc >= 2, "coarse resolution must be at least 2, got ", nc);
  require(r >= 2, "refinement factor must be at least 2, got ", r);
  TwoLevelGrid g;
  g.nc = nc;
  g.r = r;
  g.n = nc * r;
  g.H = 1.0 / nc;
  g.h = 1.0 / g.n;

  const int np = g.nodes_per_axis();
  g.dof_of_node.assign(std::size_t(np) * np, -1);
  g.node_of_dof.resize(std::size_t(g.n - 1) * (g.n - 1));
  for (int iy = 1; iy < g.n; ++iy)
    for (int ix = 1; ix < g.n; ++ix) {
      const int dof = (iy - 1) * (g.n - 1) + (ix - 1);
      g.dof_of_node[g.node_id(ix, iy)] = dof;
      g.node_of_dof[dof] = g.node_id(ix, iy);
    }

  g.neighborhoods.resize(std::size_t(nc + 1) * (nc + 1));
  for (int cy = 0; cy <= nc; ++cy)
    for (int cx = 0; cx <= nc; ++cx) {
      Neighborhood nb;
      const int cx0 = std::max(cx - 1, 0), cx1 = std::min(cx + 1, nc);
      const int cy0 = std::max(cy - 1, 0), cy1 = std::min(cy + 1, nc);
      nb.fx0 = cx0 * r;
      nb.fx1 = cx1 * r;
      nb.fy0 = cy0 * r;
      nb.fy1 = cy1 * r;
      for (int side = 0; side < 4; ++side)
        nb.edges[side] = make_side(g, side, nb.fx0, nb.fy0, nb.fx1, nb.fy1);
      g.neighborhoods[g.coarse_node_id(cx, cy)] = nb;
    }
  return g;
}

Vec nodal_interpolate(const TwoLevelGrid& grid,
                      const std::function<double(double, double)>& g) {
  Vec v(grid.interior_count());
  for (int iy = 1; iy < grid.n; ++iy)
    for (int ix = 1; ix < grid.n; ++ix) {
      const double x = grid.node_x(ix), y = grid.node_y(iy);
      const double val = g(x, y);
      require(std::isfinite(val), "non-finite sample ", val, " at (", x, ", ",
              y, ")");
      v[grid.dof_of_node[grid.node_id(ix, iy)]] = val;
    }
  return v;
}

}  // namespace mspar
