#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mspar/haar.hpp"

using namespace mspar;

namespace {

// exact integral of the product of two piecewise-constant basis functions
double gram_entry(const EdgeWaveletBasis& b, int f, int g) {
  const double cell_len = b.edge_length / b.dyadic_cells();
  double s = 0;
  for (int c = 0; c < b.dyadic_cells(); ++c)
    s += b.cell_values[f][c] * b.cell_values[g][c] * cell_len;
  return s;
}

// trapezoid integration of a piecewise-linear trace against function f,
// independent of edge_inner_products
double trapezoid_coeff(const EdgeWaveletBasis& b, const std::vector<double>& v,
                       int f) {
  const int per_cell = b.fine_segments / b.dyadic_cells();
  const double h = b.edge_length / b.fine_segments;
  double s = 0;
  for (int seg = 0; seg < b.fine_segments; ++seg)
    s += b.cell_values[f][seg / per_cell] * 0.5 * (v[seg] + v[seg + 1]) * h;
  return s;
}

}  // namespace

TEST_CASE("basis size and provenance layout") {
  for (int level : {0, 1, 2, 3}) {
    EdgeWaveletBasis b = build_haar_basis(16, 0.5, level);
    CHECK(b.count() == (1 << level));
    CHECK(b.provenance[0].level == -1);
    int f = 1;
    for (int j = 0; j < level; ++j)
      for (int p = 0; p < (1 << j); ++p, ++f) {
        CHECK(b.provenance[f].level == j);
        CHECK(b.provenance[f].pos == p);
      }
  }
}

TEST_CASE("misaligned levels are rejected with the deepest admissible level") {
  CHECK_THROWS_AS(build_haar_basis(8, 1.0, 4), Error);
  CHECK_THROWS_AS(build_haar_basis(12, 1.0, 3), Error);
  CHECK_NOTHROW(build_haar_basis(12, 1.0, 2));
  CHECK_NOTHROW(build_haar_basis(6, 1.0, 1));
  CHECK_THROWS_AS(build_haar_basis(6, 1.0, 2), Error);
  bool threw = false;
  try {
    build_haar_basis(8, 1.0, 5);
  } catch (const Error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("gram matrix is the identity") {
  for (auto [segments, length, level] :
       {std::tuple{8, 1.0, 2}, {16, 0.25, 3}, {12, 0.5, 2}, {4, 2.0, 2}}) {
    EdgeWaveletBasis b = build_haar_basis(segments, length, level);
    for (int f = 0; f < b.count(); ++f)
      for (int g = 0; g < b.count(); ++g) {
        const double expect = (f == g) ? 1.0 : 0.0;
        CHECK(std::abs(gram_entry(b, f, g) - expect) <= 1e-12);
      }
  }
}

TEST_CASE("mother wavelet nodal trace on an 8-segment unit edge") {
  EdgeWaveletBasis b = build_haar_basis(8, 1.0, 1);
  Vec t = wavelet_to_fine_trace(b, 1);
  REQUIRE(t.size() == 9);
  for (int i = 0; i <= 4; ++i) CHECK(t[i] == 1.0);
  for (int i = 5; i <= 8; ++i) CHECK(t[i] == -1.0);
  // scaling function is constant 1 on the unit edge
  Vec s = wavelet_to_fine_trace(b, 0);
  for (double v : s) CHECK(v == 1.0);
}

TEST_CASE("constant trace loads only the scaling coefficient") {
  const double length = 0.5, value = 3.25;
  EdgeWaveletBasis b = build_haar_basis(8, length, 2);
  Vec trace(9, value);
  Vec c = edge_inner_products(b, trace);
  CHECK(c[0] == doctest::Approx(value * std::sqrt(length)).epsilon(1e-14));
  for (int f = 1; f < b.count(); ++f) CHECK(std::abs(c[f]) <= 1e-14);
}

TEST_CASE("linear trace integrals match closed forms") {
  const double L = 1.0;
  EdgeWaveletBasis b = build_haar_basis(16, L, 2);
  Vec trace(17);
  for (int t = 0; t <= 16; ++t) trace[t] = t * L / 16.0;  // v(x) = x
  Vec c = edge_inner_products(b, trace);
  CHECK(c[0] == doctest::Approx(std::pow(L, 1.5) / 2).epsilon(1e-13));
  CHECK(c[1] == doctest::Approx(-std::pow(L, 1.5) / 4).epsilon(1e-13));
}

TEST_CASE("sampled wavelet keeps its own coefficient dominant") {
  EdgeWaveletBasis b = build_haar_basis(16, 1.0, 3);
  for (int f : {1, 3, 6}) {
    Vec sampled = wavelet_to_fine_trace(b, f);
    Vec c = edge_inner_products(b, sampled);
    for (int g = 0; g < b.count(); ++g) {
      CHECK(c[g] == doctest::Approx(trapezoid_coeff(b, sampled, g)).epsilon(1e-13));
      if (g != f) CHECK(std::abs(c[g]) < std::abs(c[f]));
    }
    CHECK(std::abs(c[f]) > 0.5);
  }
}

TEST_CASE("inner products validate the trace length") {
  EdgeWaveletBasis b = build_haar_basis(8, 1.0, 1);
  Vec wrong(7, 1.0);
  CHECK_THROWS_AS(edge_inner_products(b, wrong), Error);
  CHECK_THROWS_AS(wavelet_to_fine_trace(b, 5), Error);
}
