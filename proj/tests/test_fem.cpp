#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mspar/fem.hpp"
#include "oracles.hpp"

using namespace mspar;

namespace {

// dense copy of a CSR matrix
oracle::Mat dense_of(const CsrMatrix& m) {
  oracle::Mat d = oracle::zeros(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (std::int32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      d[i][m.col_idx[k]] = m.vals[k];
  return d;
}

double row_sum(const CsrMatrix& m, int i) {
  double s = 0;
  for (std::int32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) s += m.vals[k];
  return s;
}

}  // namespace

TEST_CASE("element matrices match the tensor-product closed forms") {
  const ElementMatrix& k = q1_stiffness_element();
  // local order (0,0), (1,0), (0,1), (1,1)
  CHECK(k[0][0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(k[0][1] == doctest::Approx(-1.0 / 6).epsilon(1e-14));
  CHECK(k[0][2] == doctest::Approx(-1.0 / 6).epsilon(1e-14));
  CHECK(k[0][3] == doctest::Approx(-1.0 / 3).epsilon(1e-14));
  const double h = 0.125;
  ElementMatrix m = q1_mass_element(h);
  CHECK(m[0][0] == doctest::Approx(h * h / 9).epsilon(1e-14));
  CHECK(m[0][1] == doctest::Approx(h * h / 18).epsilon(1e-14));
  CHECK(m[0][3] == doctest::Approx(h * h / 36).epsilon(1e-14));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      CHECK(k[a][b] == doctest::Approx(k[b][a]).epsilon(1e-15));
      CHECK(m[a][b] == doctest::Approx(m[b][a]).epsilon(1e-15));
    }
}

TEST_CASE("full mass rows integrate the hat functions; total mass is the area") {
  TwoLevelGrid g = build_grid(2, 4);
  CsrMatrix full = assemble_patch_mass(g, full_domain(g));
  double total = 0;
  for (int iy = 0; iy <= g.n; ++iy)
    for (int ix = 0; ix <= g.n; ++ix) {
      const double s = row_sum(full, g.node_id(ix, iy));
      const int edges = (ix == 0 || ix == g.n ? 1 : 0) + (iy == 0 || iy == g.n ? 1 : 0);
      const double expect = g.h * g.h / (edges == 0 ? 1 : edges == 1 ? 2 : 4);
      CHECK(s == doctest::Approx(expect).epsilon(1e-13));
      total += s;
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("interior mass total matches the closed form (1 - 4h/3)^2") {
  for (auto [nc, r] : {std::pair{2, 4}, {4, 4}}) {
    TwoLevelGrid g = build_grid(nc, r);
    AssembledOperator m = assemble_mass(g);
    Vec one(m.dim(), 1.0);
    const double q = quadratic_form(m.interior, one);
    const double s = 1.0 - 4.0 * g.h / 3.0;
    CHECK(q == doctest::Approx(s * s).epsilon(1e-12));
  }
}

TEST_CASE("stiffness annihilates constants before masking") {
  TwoLevelGrid g = build_grid(3, 3);
  std::mt19937_64 rng(5);
  Vec cells(std::size_t(g.n) * g.n);
  for (double& v : cells)
    v = std::uniform_real_distribution<double>(0.5, 100.0)(rng);
  CoefficientField kappa = field_from_cells(g, cells);
  CsrMatrix full = assemble_patch_stiffness(g, kappa, full_domain(g));
  for (int i = 0; i < full.rows; ++i)
    CHECK(std::abs(row_sum(full, i)) <= 1e-12 * 100.0);
}

TEST_CASE("stiffness scales linearly in the coefficient") {
  TwoLevelGrid g = build_grid(2, 3);
  CoefficientField one = uniform_field(g, 1.0);
  CoefficientField two = uniform_field(g, 2.0);
  AssembledOperator a1 = assemble_stiffness(g, one);
  AssembledOperator a2 = assemble_stiffness(g, two);
  REQUIRE(a1.interior.nnz() == a2.interior.nnz());
  for (std::size_t k = 0; k < a1.interior.vals.size(); ++k)
    CHECK(a2.interior.vals[k] == doctest::Approx(2.0 * a1.interior.vals[k]).epsilon(1e-15));
}

TEST_CASE("coefficient resolution mismatch is rejected") {
  TwoLevelGrid g = build_grid(2, 3);
  TwoLevelGrid other = build_grid(2, 4);
  CoefficientField kappa = uniform_field(other);
  CHECK_THROWS_AS(assemble_stiffness(g, kappa), Error);
}

TEST_CASE("smallest Laplace eigenvalue approaches 2 pi^2") {
  TwoLevelGrid g = build_grid(4, 4);
  AssembledOperator a = assemble_stiffness(g, uniform_field(g));
  AssembledOperator m = assemble_mass(g);
  LinearSolver solver(a.interior);
  std::mt19937_64 rng(1);
  Vec x(a.dim());
  for (double& v : x) v = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
  for (int it = 0; it < 60; ++it) {
    Vec mx = m.interior.multiply(x);
    x = solver.solve(mx);
    const double norm = weighted_norm(m.interior, x);
    for (double& v : x) v /= norm;
  }
  const double lambda = quadratic_form(a.interior, x) / quadratic_form(m.interior, x);
  CHECK(lambda == doctest::Approx(2.0 * M_PI * M_PI).epsilon(0.01));
}

TEST_CASE("energy of the interpolated first Laplace mode approaches pi^2/2") {
  TwoLevelGrid g = build_grid(8, 4);
  AssembledOperator a = assemble_stiffness(g, uniform_field(g));
  Vec v = nodal_interpolate(g, [](double x, double y) {
    return std::sin(M_PI * x) * std::sin(M_PI * y);
  });
  const double e2 = quadratic_form(a.interior, v);
  CHECK(e2 == doctest::Approx(M_PI * M_PI / 2).epsilon(0.02));
  CHECK(energy_norm(a.interior, v) == doctest::Approx(std::sqrt(e2)).epsilon(1e-15));
}

TEST_CASE("energy norm of a unit dof vector reads off the diagonal") {
  TwoLevelGrid g = build_grid(2, 4);
  AssembledOperator a = assemble_stiffness(g, uniform_field(g));
  Vec e1(a.dim(), 0.0);
  e1[0] = 1.0;
  CHECK(energy_norm(a.interior, e1) ==
        doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("direct solve matches the dense oracle and leaves a tiny residual") {
  TwoLevelGrid g = build_grid(2, 3);
  AssembledOperator a = assemble_stiffness(g, uniform_field(g));
  std::mt19937_64 rng(9);
  Vec b(a.dim());
  for (double& v : b) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  Vec x = solve(a.interior, b);
  auto x_ref = oracle::dense_solve(dense_of(a.interior), b);
  for (int i = 0; i < a.dim(); ++i)
    CHECK(x[i] == doctest::Approx(x_ref[i]).epsilon(1e-10));
  Vec res = a.interior.multiply(x);
  double rnorm = 0, bnorm = 0;
  for (int i = 0; i < a.dim(); ++i) {
    rnorm += (res[i] - b[i]) * (res[i] - b[i]);
    bnorm += b[i] * b[i];
  }
  CHECK(std::sqrt(rnorm) <= 1e-12 * std::sqrt(bnorm));
}

TEST_CASE("conjugate gradients agrees with the direct path") {
  TwoLevelGrid g = build_grid(3, 4);
  AssembledOperator a = assemble_stiffness(g, uniform_field(g));
  Vec b(a.dim(), 1.0);
  Vec xd = solve(a.interior, b);
  LinearSolveConfig cg;
  cg.method = LinearSolveConfig::Method::conjugate_gradient;
  cg.tolerance = 1e-12;
  Vec xc = solve(a.interior, b, cg);
  for (int i = 0; i < a.dim(); ++i)
    CHECK(xc[i] == doctest::Approx(xd[i]).epsilon(1e-8));
}

TEST_CASE("cg failure reports the residual") {
  TwoLevelGrid g = build_grid(3, 4);
  AssembledOperator a = assemble_stiffness(g, uniform_field(g));
  Vec b(a.dim(), 1.0);
  LinearSolveConfig cg;
  cg.method = LinearSolveConfig::Method::conjugate_gradient;
  cg.tolerance = 1e-12;
  cg.max_iterations = 2;
  CHECK_THROWS_AS(solve(a.interior, b, cg), Error);
}

TEST_CASE("solver configuration is validated") {
  TwoLevelGrid g = build_grid(2, 2);
  AssembledOperator a = assemble_stiffness(g, uniform_field(g));
  LinearSolveConfig bad;
  bad.tolerance = 1e-3;  // too loose
  CHECK_THROWS_AS(LinearSolver(a.interior, bad), Error);
  bad.tolerance = -1.0;
  CHECK_THROWS_AS(LinearSolver(a.interior, bad), Error);
  Vec b(3, 0.0);
  LinearSolver ok(a.interior);
  CHECK_THROWS_AS(ok.solve(b), Error);
}

TEST_CASE("constant load vector integrates each interior hat") {
  TwoLevelGrid g = build_grid(2, 2);
  AssembledOperator m = assemble_mass(g);
  Vec f = load_vector(g, m, [](double, double) { return 1.0; });
  for (int i = 0; i < m.dim(); ++i)
    CHECK(f[i] == doctest::Approx(g.h * g.h).epsilon(1e-13));
}

TEST_CASE("l2 projection matches dense normal equations and is M-orthogonal") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-1, 1);
  const int rows = 20, cols = 5;
  // random dense-ish basis stored as CSC
  CscMatrix basis;
  basis.rows = rows;
  basis.cols = cols;
  basis.col_ptr.push_back(0);
  oracle::Mat phi = oracle::zeros(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double v = dist(rng);
      phi[i][j] = v;
      basis.row_idx.push_back(i);
      basis.vals.push_back(v);
    }
    basis.col_ptr.push_back(std::int32_t(basis.row_idx.size()));
  }
  oracle::Mat mass = oracle::random_spd(rows, 2.0, rng);
  CooBuilder coo(rows, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < rows; ++j) coo.add(i, j, mass[i][j]);
  CsrMatrix m = coo.compress();
  Vec v(rows);
  for (double& x : v) x = dist(rng);

  Vec c = l2_project_onto(basis, m, v);

  // oracle: solve (phi' M phi) c = phi' M v densely
  oracle::Mat mphi = oracle::zeros(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      for (int k = 0; k < rows; ++k) mphi[i][j] += mass[i][k] * phi[k][j];
  oracle::Mat gram = oracle::zeros(cols, cols);
  std::vector<double> rhs(cols, 0.0);
  for (int a = 0; a < cols; ++a) {
    for (int b = 0; b < cols; ++b)
      for (int k = 0; k < rows; ++k) gram[a][b] += phi[k][a] * mphi[k][b];
    for (int k = 0; k < rows; ++k) rhs[a] += mphi[k][a] * v[k];
  }
  auto c_ref = oracle::dense_solve(gram, rhs);
  for (int j = 0; j < cols; ++j)
    CHECK(c[j] == doctest::Approx(c_ref[j]).epsilon(1e-9));

  // Galerkin orthogonality of the residual
  Vec recon = basis.multiply(c);
  Vec diff(rows);
  for (int i = 0; i < rows; ++i) diff[i] = v[i] - recon[i];
  Vec mdiff = m.multiply(diff);
  Vec g = basis.transpose_multiply(mdiff);
  double vnorm = 0, mmax = 0;
  for (double x : v) vnorm = std::max(vnorm, std::abs(x));
  for (double x : m.vals) mmax = std::max(mmax, std::abs(x));
  for (int j = 0; j < cols; ++j)
    CHECK(std::abs(g[j]) <= 1e-9 * (1.0 + vnorm) * (1.0 + mmax));
}

TEST_CASE("projection onto the full nodal basis is the identity") {
  TwoLevelGrid g = build_grid(2, 3);
  AssembledOperator m = assemble_mass(g);
  // identity basis as CSC
  CscMatrix eye;
  eye.rows = eye.cols = m.dim();
  eye.col_ptr.resize(m.dim() + 1);
  for (int j = 0; j <= m.dim(); ++j) eye.col_ptr[j] = j;
  eye.row_idx.resize(m.dim());
  eye.vals.assign(m.dim(), 1.0);
  for (int j = 0; j < m.dim(); ++j) eye.row_idx[j] = j;
  std::mt19937_64 rng(2);
  Vec v(m.dim());
  for (double& x : v) x = std::uniform_real_distribution<double>(-1, 1)(rng);
  Vec c = l2_project_onto(eye, m.interior, v);
  for (int i = 0; i < m.dim(); ++i)
    CHECK(c[i] == doctest::Approx(v[i]).epsilon(1e-11));
}

TEST_CASE("patch assembly rejects rectangles outside the grid") {
  TwoLevelGrid g = build_grid(2, 2);
  CoefficientField kappa = uniform_field(g);
  CHECK_THROWS_AS(assemble_patch_stiffness(g, kappa, CellRect{0, 0, 5, 2}), Error);
  CHECK_THROWS_AS(assemble_patch_mass(g, CellRect{2, 2, 2, 3}), Error);
}
