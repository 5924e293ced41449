#include "mspar/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mspar/util.hpp"

namespace mspar {

Inclusion Inclusion::rect(double x0, double y0, double x1, double y1,
                          double value) {
  require(x0 < x1 && y0 < y1, "degenerate rectangle [", x0, ",", x1, "]x[", y0,
          ",", y1, "]");
  Inclusion inc;
  inc.shape = Shape::rectangle;
  inc.x0 = x0;
  inc.y0 = y0;
  inc.x1 = x1;
  inc.y1 = y1;
  inc.value = value;
  return inc;
}

Inclusion Inclusion::disc(double cx, double cy, double radius, double value) {
  require(radius > 0, "disc radius must be positive, got ", radius);
  Inclusion inc;
  inc.shape = Shape::disc;
  inc.cx = cx;
  inc.cy = cy;
  inc.radius = radius;
  inc.value = value;
  return inc;
}

bool Inclusion::contains(double x, double y) const {
  if (shape == Shape::rectangle)
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  const double dx = x - cx, dy = y - cy;
  return dx * dx + dy * dy <= radius * radius;
}

namespace {

void finalize_bounds(CoefficientField& f) {
  f.min_value = *std::min_element(f.cell_values.begin(), f.cell_values.end());
  f.max_value = *std::max_element(f.cell_values.begin(), f.cell_values.end());
  require(f.min_value > 0, "diffusion coefficient must be positive, found ",
          f.min_value);
}

}  // namespace

CoefficientField uniform_field(const TwoLevelGrid& grid, double value) {
  require(value > 0, "diffusion coefficient must be positive, got ", value);
  CoefficientField f;
  f.n = grid.n;
  f.cell_values.assign(std::size_t(grid.n) * grid.n, value);
  f.min_value = f.max_value = value;
  return f;
}

CoefficientField build_inclusion_field(const TwoLevelGrid& grid,
                                       const std::vector<Inclusion>& inclusions) {
  for (const Inclusion& inc : inclusions)
    require(inc.value >= 1.0,
            "inclusion value must be at least the unit background, got ",
            inc.value);
  CoefficientField f;
  f.n = grid.n;
  f.cell_values.assign(std::size_t(grid.n) * grid.n, 1.0);
  f.inclusions = inclusions;
  for (int cy = 0; cy < grid.n; ++cy)
    for (int cx = 0; cx < grid.n; ++cx) {
      const double x = (cx + 0.5) * grid.h;
      const double y = (cy + 0.5) * grid.h;
      int hits = 0;
      for (const Inclusion& inc : inclusions)
        if (inc.contains(x, y)) {
          ++hits;
          require(hits == 1, "overlapping inclusions at cell (", cx, ",", cy,
                  "), center (", x, ",", y, ")");
          f.cell_values[std::size_t(cy) * grid.n + cx] = inc.value;
        }
    }
  finalize_bounds(f);
  return f;
}

CoefficientField field_from_cells(const TwoLevelGrid& grid, Vec cell_values) {
  require(cell_values.size() == std::size_t(grid.n) * grid.n,
          "cell grid has ", cell_values.size(), " values, expected ",
          std::size_t(grid.n) * grid.n);
  for (double v : cell_values)
    require(std::isfinite(v), "non-finite coefficient value ", v);
  CoefficientField f;
  f.n = grid.n;
  f.cell_values = std::move(cell_values);
  finalize_bounds(f);
  return f;
}

CoefficientField load_field_text(const TwoLevelGrid& grid,
                                 const std::string& path) {
  std::istringstream in(read_text_file(path));
  Vec values;
  values.reserve(std::size_t(grid.n) * grid.n);
  double v;
  while (in >> v) values.push_back(v);
  require(!in.fail() || in.eof(), "malformed number in coefficient file ", path);
  require(values.size() == std::size_t(grid.n) * grid.n, "coefficient file ",
          path, " has ", values.size(), " values, expected ",
          std::size_t(grid.n) * grid.n);
  return field_from_cells(grid, std::move(values));
}

void save_field_text(const CoefficientField& field, const std::string& path) {
  std::ostringstream os;
  for (int cy = 0; cy < field.n; ++cy) {
    for (int cx = 0; cx < field.n; ++cx) {
      if (cx) os << " ";
      os << format_double(field.at(cx, cy));
    }
    os << "\n";
  }
  write_text_file(path, os.str());
}

std::vector<Inclusion> inclusions_from_json_text(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail("inclusion config is not valid JSON: ", e.what());
  }
  require(j.is_object() && j.contains("inclusions") && j["inclusions"].is_array(),
          "inclusion config must be an object with an 'inclusions' array");
  std::vector<Inclusion> result;
  for (const auto& item : j["inclusions"]) {
    require(item.is_object() && item.contains("shape") && item.contains("value"),
            "each inclusion needs 'shape' and 'value'");
    const std::string shape = item["shape"].get<std::string>();
    const double value = item["value"].get<double>();
    if (shape == "rectangle") {
      result.push_back(Inclusion::rect(item.at("x0").get<double>(),
                                       item.at("y0").get<double>(),
                                       item.at("x1").get<double>(),
                                       item.at("y1").get<double>(), value));
    } else if (shape == "disc") {
      result.push_back(Inclusion::disc(item.at("cx").get<double>(),
                                       item.at("cy").get<double>(),
                                       item.at("radius").get<double>(), value));
    } else {
      fail("unknown inclusion shape '", shape, "'");
    }
  }
  return result;
}

std::string inclusions_to_json_text(const std::vector<Inclusion>& inclusions) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Inclusion& inc : inclusions) {
    nlohmann::json j;
    if (inc.shape == Inclusion::Shape::rectangle) {
      j["shape"] = "rectangle";
      j["x0"] = inc.x0;
      j["y0"] = inc.y0;
      j["x1"] = inc.x1;
      j["y1"] = inc.y1;
    } else {
      j["shape"] = "disc";
      j["cx"] = inc.cx;
      j["cy"] = inc.cy;
      j["radius"] = inc.radius;
    }
    j["value"] = inc.value;
    arr.push_back(j);
  }
  return nlohmann::json{{"inclusions", arr}}.dump(2);
}

}  // namespace mspar
