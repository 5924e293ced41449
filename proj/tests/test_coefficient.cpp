#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "mspar/coefficient.hpp"
#include "mspar/util.hpp"

using namespace mspar;

namespace {

std::string temp_path(const char* name) {
  return std::string(::getenv("TMPDIR") ? ::getenv("TMPDIR") : "/tmp") + "/" +
         name;
}

}  // namespace

TEST_CASE("uniform field is the unit background") {
  TwoLevelGrid g = build_grid(2, 4);
  CoefficientField f = uniform_field(g);
  CHECK(f.min_value == 1.0);
  CHECK(f.max_value == 1.0);
  CHECK(f.contrast() == 1.0);
  for (double v : f.cell_values) CHECK(v == 1.0);
}

TEST_CASE("disc inclusion: contrast and covered-cell count match a direct scan") {
  TwoLevelGrid g = build_grid(8, 8);
  // radius chosen so the disc area is a quarter of the domain
  const double radius = std::sqrt(0.25 / M_PI);
  auto disc = Inclusion::disc(0.5, 0.5, radius, 1e4);
  CoefficientField f = build_inclusion_field(g, {disc});
  CHECK(f.min_value == 1.0);
  CHECK(f.max_value == 1e4);
  CHECK(f.contrast() == 1e4);

  int inside = 0, marked = 0;
  for (int cy = 0; cy < g.n; ++cy)
    for (int cx = 0; cx < g.n; ++cx) {
      const double x = (cx + 0.5) * g.h, y = (cy + 0.5) * g.h;
      const double dx = x - 0.5, dy = y - 0.5;
      if (dx * dx + dy * dy <= radius * radius) ++inside;
      if (f.at(cx, cy) == 1e4) ++marked;
      if (f.at(cx, cy) != 1e4) CHECK(f.at(cx, cy) == 1.0);
    }
  CHECK(inside == marked);
  // the disc covers about a quarter of the 4096 cells
  CHECK(std::abs(inside - 1024) < 80);
}

TEST_CASE("two disjoint rectangles keep their own values") {
  TwoLevelGrid g = build_grid(4, 8);
  auto a = Inclusion::rect(0.10, 0.10, 0.30, 0.30, 1e2);
  auto b = Inclusion::rect(0.60, 0.60, 0.90, 0.80, 1e3);
  CoefficientField f = build_inclusion_field(g, {a, b});
  CHECK(f.max_value == 1e3);
  CHECK(f.min_value == 1.0);
  for (int cy = 0; cy < g.n; ++cy)
    for (int cx = 0; cx < g.n; ++cx) {
      const double x = (cx + 0.5) * g.h, y = (cy + 0.5) * g.h;
      double expect = 1.0;
      if (a.contains(x, y)) expect = 1e2;
      if (b.contains(x, y)) expect = 1e3;
      CHECK(f.at(cx, cy) == expect);
    }
}

TEST_CASE("overlapping inclusions are rejected") {
  TwoLevelGrid g = build_grid(4, 4);
  auto a = Inclusion::rect(0.2, 0.2, 0.6, 0.6, 10.0);
  auto b = Inclusion::rect(0.5, 0.5, 0.8, 0.8, 20.0);
  CHECK_THROWS_AS(build_inclusion_field(g, {a, b}), Error);
}

TEST_CASE("values below the background are rejected") {
  TwoLevelGrid g = build_grid(4, 4);
  auto weak = Inclusion::rect(0.2, 0.2, 0.4, 0.4, 0.5);
  CHECK_THROWS_AS(build_inclusion_field(g, {weak}), Error);
}

TEST_CASE("text round trip is bit-exact") {
  TwoLevelGrid g = build_grid(2, 3);
  Vec cells(std::size_t(g.n) * g.n);
  for (std::size_t i = 0; i < cells.size(); ++i)
    cells[i] = 1.0 + double(i) / 7.0 + 1e-13 * double(i * i);
  CoefficientField f = field_from_cells(g, cells);
  const std::string path = temp_path("mspar_coeff_roundtrip.txt");
  save_field_text(f, path);
  CoefficientField back = load_field_text(g, path);
  REQUIRE(back.cell_values.size() == f.cell_values.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    CHECK(back.cell_values[i] == f.cell_values[i]);
  std::remove(path.c_str());
}

TEST_CASE("malformed or missing coefficient files are reported") {
  TwoLevelGrid g = build_grid(2, 2);
  CHECK_THROWS_AS(load_field_text(g, "/nonexistent/kappa.txt"), Error);
  const std::string path = temp_path("mspar_coeff_short.txt");
  write_text_file(path, "1.0 2.0 3.0\n");
  CHECK_THROWS_AS(load_field_text(g, path), Error);
  std::remove(path.c_str());
}

TEST_CASE("inclusion JSON round trip") {
  std::vector<Inclusion> incs = {Inclusion::rect(0.1, 0.2, 0.3, 0.4, 1e3),
                                 Inclusion::disc(0.7, 0.7, 0.05, 1e4)};
  const std::string text = inclusions_to_json_text(incs);
  auto back = inclusions_from_json_text(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].shape == Inclusion::Shape::rectangle);
  CHECK(back[0].x1 == 0.3);
  CHECK(back[0].value == 1e3);
  CHECK(back[1].shape == Inclusion::Shape::disc);
  CHECK(back[1].radius == 0.05);

  CHECK_THROWS_AS(inclusions_from_json_text("not json"), Error);
  CHECK_THROWS_AS(inclusions_from_json_text("{\"inclusions\": 5}"), Error);
  CHECK_THROWS_AS(
      inclusions_from_json_text(
          "{\"inclusions\": [{\"shape\": \"triangle\", \"value\": 2}]}"),
      Error);
}

TEST_CASE("degenerate inclusion geometry is rejected") {
  CHECK_THROWS_AS(Inclusion::rect(0.5, 0.1, 0.5, 0.2, 2.0), Error);
  CHECK_THROWS_AS(Inclusion::disc(0.5, 0.5, 0.0, 2.0), Error);
}
