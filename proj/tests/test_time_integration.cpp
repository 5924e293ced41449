#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "mspar/fem.hpp"
#include "mspar/time_integration.hpp"

using namespace mspar;

namespace {

constexpr double kPi = 3.14159265358979323846;

CoefficientField contrast_field(const TwoLevelGrid& g) {
  std::vector<Inclusion> inc;
  inc.push_back(Inclusion::rect(0.30, 0.30, 0.45, 0.40, 1e4));
  inc.push_back(Inclusion::disc(0.65, 0.60, 0.08, 1e3));
  return build_inclusion_field(g, inc);
}

// grid, operators and multiscale space with stable addresses for the
// lifetime of a test case
struct ReducedSetup {
  TwoLevelGrid g;
  CoefficientField kap;
  AssembledOperator mass, stiff;
  MultiscaleSpace space;

  ReducedSetup(int nc, int r, int level, bool uniform = false)
      : g(build_grid(nc, r)),
        kap(uniform ? uniform_field(g, 1.0) : contrast_field(g)),
        mass(assemble_mass(g)),
        stiff(assemble_stiffness(g, kap)),
        space(assemble_multiscale_space(g, kap, mass, stiff,
                                        {level, 1e-10, {}})) {}
  ReducedSetup(const ReducedSetup&) = delete;
};

ProblemData zero_data() {
  ProblemData d;
  d.u0 = [](double, double) { return 0.0; };
  d.zero_source = true;
  return d;
}

ProblemData decay_data() {  // pure decay of a smooth bump
  ProblemData d;
  d.u0 = [](double x, double y) {
    return std::sin(kPi * x) * std::sin(kPi * y);
  };
  d.zero_source = true;
  return d;
}

ProblemData driven_data() {  // genuinely time-dependent smooth source
  ProblemData d;
  d.u0 = [](double x, double y) { return x * (1 - x) * y * (1 - y); };
  d.f = [](double x, double y, double t) {
    return std::sin(kPi * x) * std::sin(kPi * y) * (1.0 + std::cos(3.0 * t)) +
           0.5 * x * t;
  };
  return d;
}

Vec random_vec(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vec v(n);
  for (double& x : v) x = d(gen);
  return v;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double reconstructed_norm(const ReducedSetup& s, const Vec& coeff) {
  return weighted_norm(s.mass.interior, s.space.reconstruct(coeff));
}

}  // namespace

TEST_CASE("time grid construction enforces divisibility") {
  TimeGrid tg = TimeGrid::create(1.0, 0.1, 1e-3);
  CHECK(tg.intervals == 10);
  CHECK(tg.ratio == 100);
  CHECK(tg.coarse_time(3) == doctest::Approx(0.3).epsilon(1e-12));

  CHECK_THROWS_AS(TimeGrid::create(1.0, 0.1, 0.1), Error);     // ratio 1
  CHECK_THROWS_AS(TimeGrid::create(1.0, 0.3, 0.1), Error);     // 0.3 !| 1.0
  CHECK_THROWS_AS(TimeGrid::create(1.0, 0.1, 3e-4), Error);    // 3e-4 !| 0.1
  CHECK_THROWS_AS(TimeGrid::create(-1.0, 0.1, 1e-3), Error);
  CHECK_THROWS_AS(TimeGrid::create(1.0, 0.0, 1e-3), Error);
  SchemeConfig bad{Scheme::crank_nicolson, -1};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("zero data stays zero along both solvers") {
  ReducedSetup s(4, 4, 1);
  ProblemData d = zero_data();
  FineSystem fine(s.g, s.mass, s.stiff, d);
  ReducedSystem red(s.space, d);
  TimeGrid tg = TimeGrid::create(0.02, 0.01, 2e-3);

  for (const Vec& u : fine_reference_solve(fine, {}, tg).states)
    for (double x : u) CHECK(x == 0.0);
  for (const Vec& u : multiscale_sequential_solve(red, {}, tg).states)
    for (double x : u) CHECK(x == 0.0);
}

TEST_CASE("scheme orders against the exact decay of the discrete mode") {
  // the interpolated sine bump is an exact generalized eigenvector of the
  // assembled pencil on a uniform grid, so the spatially discrete flow is a
  // pure exponential and the time-stepping error can be read off cleanly
  TwoLevelGrid g = build_grid(4, 8);
  CoefficientField one = uniform_field(g, 1.0);
  AssembledOperator mass = assemble_mass(g);
  AssembledOperator stiff = assemble_stiffness(g, one);
  ProblemData d = decay_data();
  FineSystem fine(g, mass, stiff, d);

  Vec v = nodal_interpolate(g, d.u0);
  const double lambda = quadratic_form(stiff.interior, v) /
                        quadratic_form(mass.interior, v);
  const double T = 0.1;

  auto final_error = [&](Scheme scheme, double dt) {
    TimeGrid tg = TimeGrid::create(T, 0.02, dt);
    SchemeConfig cfg{scheme, 3};
    Vec u = fine_reference_solve(fine, cfg, tg).states.back();
    const double decay = std::exp(-lambda * T);
    Vec diff(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) diff[i] = u[i] - decay * v[i];
    return weighted_norm(mass.interior, diff);
  };

  Vec be, cn;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    be.push_back(final_error(Scheme::backward_euler, dt));
    cn.push_back(final_error(Scheme::crank_nicolson, dt));
  }
  for (int i = 0; i < 2; ++i) {
    const double r_be = be[i] / be[i + 1];
    const double r_cn = cn[i] / cn[i + 1];
    CHECK(r_be >= 1.8);
    CHECK(r_be <= 2.2);
    CHECK(r_cn >= 3.5);
    CHECK(r_cn <= 4.5);
  }
}

TEST_CASE("a window of one implicit step is the coarse propagator") {
  ReducedSetup s(4, 4, 1);
  ProblemData d = driven_data();
  ReducedSystem red(s.space, d);
  Vec u = random_vec(std::size_t(s.space.dim()), 11u);
  const double dt = 2e-3;

  Vec coarse = coarse_propagate(red, u, 0.0, dt);
  Vec fine = fine_propagate(red, {}, u, 0.0, dt, dt);
  CHECK(coarse == fine);

  Vec jump = jump_operator(red, {}, u, 0.0, dt, dt);
  for (double x : jump) CHECK(x == 0.0);

  // the first step of the sequential solve is the same object
  TimeGrid one_step;
  one_step.final_time = dt;
  one_step.coarse_step = dt;
  one_step.fine_step = dt;
  one_step.intervals = 1;
  one_step.ratio = 1;
  Trajectory traj = multiscale_sequential_solve(red, {}, one_step);
  CHECK(traj.states[1] == coarse_propagate(red, traj.states[0], 0.0, dt));
}

TEST_CASE("fine propagation composes like a semigroup without forcing") {
  ReducedSetup s(4, 4, 1);
  ProblemData d = decay_data();
  ReducedSystem red(s.space, d);
  Vec u = random_vec(std::size_t(s.space.dim()), 23u);
  const double dT = 0.01, dt = 1e-3;

  for (Scheme scheme : {Scheme::backward_euler, Scheme::crank_nicolson}) {
    SchemeConfig cfg{scheme, 3};
    Vec two_hops = fine_propagate(red, cfg, fine_propagate(red, cfg, u, 0.0, dT, dt),
                                  dT, dT, dt);
    Vec one_run = fine_propagate(red, cfg, u, 0.0, 2 * dT, dt);
    CHECK(two_hops == one_run);
  }
}

TEST_CASE("window propagation reproduces the sequential trajectory") {
  ReducedSetup s(4, 4, 1);
  ProblemData d = driven_data();
  ReducedSystem red(s.space, d);
  TimeGrid tg = TimeGrid::create(0.05, 0.01, 1e-3);

  for (Scheme scheme : {Scheme::backward_euler, Scheme::crank_nicolson}) {
    SchemeConfig cfg{scheme, 3};
    Trajectory traj = multiscale_sequential_solve(red, cfg, tg);
    for (int n = 0; n < tg.intervals; ++n) {
      Vec hop = fine_propagate(red, cfg, traj.states[std::size_t(n)],
                               traj.times[std::size_t(n)], tg.coarse_step,
                               tg.fine_step);
      CHECK(max_abs_diff(hop, traj.states[std::size_t(n) + 1]) <= 1e-12);
    }
  }
}

TEST_CASE("implicit stepping never amplifies an unforced state") {
  ReducedSetup s(4, 4, 1);
  ProblemData d = zero_data();
  FineSystem fine(s.g, s.mass, s.stiff, d);
  ReducedSystem red(s.space, d);

  Vec uf = random_vec(std::size_t(fine.dim()), 3u);
  double prev = weighted_norm(s.mass.interior, uf);
  for (int j = 0; j < 20; ++j) {
    run_steps(fine, {}, uf, j * 1e-3, 1e-3, 1, j);
    const double cur = weighted_norm(s.mass.interior, uf);
    CHECK(cur <= prev * (1 + 1e-13));
    prev = cur;
  }

  Vec ur = random_vec(std::size_t(red.dim()), 4u);
  prev = reconstructed_norm(s, ur);
  for (int j = 0; j < 20; ++j) {
    run_steps(red, {}, ur, j * 1e-3, 1e-3, 1, j);
    const double cur = reconstructed_norm(s, ur);
    CHECK(cur <= prev * (1 + 1e-13));
    prev = cur;
  }
}

TEST_CASE("the coarse propagator is nonexpansive without forcing") {
  ReducedSetup s(4, 4, 1);
  ProblemData d = zero_data();
  ReducedSystem red(s.space, d);
  for (unsigned seed = 0; seed < 20; ++seed) {
    Vec v1 = random_vec(std::size_t(red.dim()), 100 + seed);
    Vec v2 = random_vec(std::size_t(red.dim()), 200 + seed);
    Vec e1 = coarse_propagate(red, v1, 0.3, 0.01);
    Vec e2 = coarse_propagate(red, v2, 0.3, 0.01);
    Vec dprop(v1.size()), dstate(v1.size());
    for (std::size_t i = 0; i < v1.size(); ++i) {
      dprop[i] = e1[i] - e2[i];
      dstate[i] = v1[i] - v2[i];
    }
    CHECK(reconstructed_norm(s, dprop) <=
          reconstructed_norm(s, dstate) * (1 + 1e-12));
  }
}

TEST_CASE("a vanishing coarse step barely moves a smooth state") {
  // uniform coefficient: the bump is smooth for the operator, so one step of
  // size c moves the state by about c times its decay rate
  ReducedSetup s(4, 4, 1, /*uniform=*/true);
  ProblemData d = decay_data();
  ReducedSystem red(s.space, d);
  Vec v = red.initial_state();
  Vec e = coarse_propagate(red, v, 0.0, 1e-8);
  Vec diff(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) diff[i] = e[i] - v[i];
  CHECK(reconstructed_norm(s, diff) <= 1e-6 * reconstructed_norm(s, v));
}

TEST_CASE("jump differences are blind to the source term") {
  ReducedSetup s(4, 4, 1);
  ProblemData driven = driven_data();
  ProblemData quiet = zero_data();
  ReducedSystem with_f(s.space, driven);
  ReducedSystem without_f(s.space, quiet);
  Vec v1 = random_vec(std::size_t(s.space.dim()), 41u);
  Vec v2 = random_vec(std::size_t(s.space.dim()), 42u);

  for (Scheme scheme : {Scheme::backward_euler, Scheme::crank_nicolson}) {
    SchemeConfig cfg{scheme, 3};
    auto jump_gap = [&](const ReducedSystem& sys) {
      Vec a = jump_operator(sys, cfg, v1, 0.02, 0.01, 1e-3);
      Vec b = jump_operator(sys, cfg, v2, 0.02, 0.01, 1e-3);
      for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
      return a;
    };
    // exact cancellation up to rounding, which the 1e4 contrast amplifies
    CHECK(max_abs_diff(jump_gap(with_f), jump_gap(without_f)) <= 1e-8);
  }
}

TEST_CASE("sources without time dependence assemble one load vector") {
  TwoLevelGrid g = build_grid(4, 4);
  AssembledOperator mass = assemble_mass(g);
  CoefficientField one = uniform_field(g, 1.0);
  AssembledOperator stiff = assemble_stiffness(g, one);

  ProblemData flagged;
  flagged.u0 = [](double, double) { return 0.0; };
  flagged.f = [](double x, double y, double) { return x + 2 * y; };
  flagged.time_constant_source = true;
  ProblemData plain = flagged;
  plain.time_constant_source = false;

  FineSystem cached(g, mass, stiff, flagged);
  FineSystem fresh(g, mass, stiff, plain);
  CHECK(cached.load_at(0.3) == cached.load_at(0.7));
  CHECK(fresh.load_at(0.1) == fresh.load_at(0.9));
  CHECK(cached.load_at(0.5) == fresh.load_at(0.5));
}

TEST_CASE("startup steps coincide with the first-order scheme, then stop") {
  ReducedSetup s(4, 4, 1);
  ProblemData d = driven_data();
  ReducedSystem red(s.space, d);
  Vec u0 = red.initial_state();

  Vec damped = u0;
  run_steps(red, SchemeConfig{Scheme::crank_nicolson, 3}, damped, 0.0, 1e-3, 3,
            0);
  Vec euler = u0;
  run_steps(red, SchemeConfig{Scheme::backward_euler, 0}, euler, 0.0, 1e-3, 3,
            0);
  CHECK(damped == euler);

  // past the startup window the scheme is untouched second order
  Vec late_a = u0;
  run_steps(red, SchemeConfig{Scheme::crank_nicolson, 3}, late_a, 0.5, 1e-3, 4,
            500);
  Vec late_b = u0;
  run_steps(red, SchemeConfig{Scheme::crank_nicolson, 0}, late_b, 0.5, 1e-3, 4,
            500);
  CHECK(late_a == late_b);
}

TEST_CASE("stepping failures name the offending step") {
  TwoLevelGrid g = build_grid(4, 4);
  CoefficientField one = uniform_field(g, 1.0);
  AssembledOperator mass = assemble_mass(g);
  AssembledOperator stiff = assemble_stiffness(g, one);
  ProblemData d = zero_data();
  FineSystem fine(g, mass, stiff, d);

  Vec u = random_vec(std::size_t(fine.dim()), 9u);
  bool threw = false;
  try {
    // a large negative shift makes the implicit operator indefinite
    run_steps(fine, {}, u, 0.0, -0.5, 3, 0);
  } catch (const Error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("time step 0") != std::string::npos);
  }
  CHECK(threw);

  Vec wrong(std::size_t(fine.dim()) + 1, 0.0);
  CHECK_THROWS_AS(run_steps(fine, {}, wrong, 0.0, 1e-3, 1, 0), Error);
}

TEST_CASE("deeper hierarchies track the fine reference more closely") {
  TwoLevelGrid g = build_grid(4, 8);
  CoefficientField kap = contrast_field(g);
  AssembledOperator mass = assemble_mass(g);
  AssembledOperator stiff = assemble_stiffness(g, kap);
  ProblemData d = decay_data();
  FineSystem fine(g, mass, stiff, d);
  TimeGrid tg = TimeGrid::create(0.05, 0.01, 5e-3);
  Vec ref = fine_reference_solve(fine, {}, tg).states.back();
  const double ref_norm = weighted_norm(mass.interior, ref);

  Vec errs;
  for (int level = 0; level <= 3; ++level) {
    MultiscaleSpace space =
        assemble_multiscale_space(g, kap, mass, stiff, {level, 1e-10, {}});
    ReducedSystem red(space, d);
    Vec u = multiscale_sequential_solve(red, {}, tg).states.back();
    Vec rec = space.reconstruct(u);
    Vec diff(rec.size());
    for (std::size_t i = 0; i < rec.size(); ++i) diff[i] = rec[i] - ref[i];
    errs.push_back(weighted_norm(mass.interior, diff) / ref_norm);
  }
  for (std::size_t l = 1; l < errs.size(); ++l)
    CHECK(errs[l] <= errs[l - 1] * 1.1);
  CHECK(errs[3] < 0.8 * errs[0]);
}
