#pragma once

#include <functional>
#include <string>

#include "mspar/grid.hpp"

namespace mspar {

// Axis-aligned rectangle or disc carrying a constant diffusion value against
// the unit background. Membership is decided at fine-cell centers.
struct Inclusion {
  enum class Shape { rectangle, disc };
  Shape shape = Shape::rectangle;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // rectangle corners
  double cx = 0, cy = 0, radius = 0;      // disc
  double value = 1.0;

  static Inclusion rect(double x0, double y0, double x1, double y1, double value);
  static Inclusion disc(double cx, double cy, double radius, double value);
  bool contains(double x, double y) const;
};

// Piecewise-constant diffusion coefficient on the fine cells, row-major
// (cell index cy*n + cx).
struct CoefficientField {
  int n = 0;
  Vec cell_values;
  double min_value = 1.0, max_value = 1.0;
  std::vector<Inclusion> inclusions;  // descriptors when built from inclusions

  double at(int cx, int cy) const { return cell_values[std::size_t(cy) * n + cx]; }
  double contrast() const { return max_value / min_value; }
};

CoefficientField uniform_field(const TwoLevelGrid& grid, double value = 1.0);

// Stamps inclusion values onto the background-1 field. A cell center inside
// two inclusions or a value below 1 is an error.
CoefficientField build_inclusion_field(const TwoLevelGrid& grid,
                                       const std::vector<Inclusion>& inclusions);

CoefficientField field_from_cells(const TwoLevelGrid& grid, Vec cell_values);

// Plain-text cell grid: n*n whitespace-separated values, row-major; written
// values reparse bit-exactly.
CoefficientField load_field_text(const TwoLevelGrid& grid, const std::string& path);
void save_field_text(const CoefficientField& field, const std::string& path);

// JSON: {"inclusions": [{"shape": "rectangle", "x0": .., "y0": .., "x1": ..,
// "y1": .., "value": ..} | {"shape": "disc", "cx": .., "cy": .., "radius": ..,
// "value": ..}, ...]}
std::vector<Inclusion> inclusions_from_json_text(const std::string& json_text);
std::string inclusions_to_json_text(const std::vector<Inclusion>& inclusions);

// Initial condition, source and horizon of one parabolic problem.
struct ProblemData {
  std::function<double(double, double)> u0;
  std::function<double(double, double, double)> f;  // f(x, y, t)
  double final_time = 1.0;
  bool zero_source = false;           // skip load assembly entirely
  bool time_constant_source = false;  // F(t) may be cached
};

}  // namespace mspar
