#include "mspar/time_integration.hpp"

#include <cmath>
#include <utility>

#include "mspar/fem.hpp"
#include "mspar/kernels.hpp"

namespace mspar {

TimeGrid TimeGrid::create(double final_time, double coarse_step,
                          double fine_step) {
  require(final_time > 0 && coarse_step > 0 && fine_step > 0,
          "time grid needs positive final time and steps, got T = ", final_time,
          ", coarse = ", coarse_step, ", fine = ", fine_step);
  TimeGrid tg;
  tg.final_time = final_time;
  tg.coarse_step = coarse_step;
  tg.fine_step = fine_step;
  tg.intervals = int(std::llround(final_time / coarse_step));
  require(tg.intervals >= 1 &&
              std::abs(tg.intervals * coarse_step - final_time) <=
                  1e-9 * final_time,
          "coarse step ", coarse_step, " does not divide the final time ",
          final_time);
  tg.ratio = int(std::llround(coarse_step / fine_step));
  require(std::abs(tg.ratio * fine_step - coarse_step) <= 1e-9 * coarse_step,
          "fine step ", fine_step, " does not divide the coarse step ",
          coarse_step);
  require(tg.ratio >= 2, "the fine step must refine the coarse step, got ratio ",
          tg.ratio);
  return tg;
}

void SchemeConfig::validate() const {
  require(startup_steps >= 0, "startup step count must be nonnegative, got ",
          startup_steps);
}

namespace {

Vec assemble_load(const TwoLevelGrid& grid, const AssembledOperator& mass,
                  const std::function<double(double, double, double)>& f,
                  double t) {
  return load_vector(grid, mass,
                     [&](double x, double y) { return f(x, y, t); });
}

// (M + dt A) u_next = M u + dt * source, writing u_next over state
void implicit_euler_core(const ParabolicSystem& sys, Vec& state, double dt,
                         Vec& scratch, const Vec& source) {
  scratch.resize(state.size());
  sys.mass().multiply(state.data(), scratch.data());
  kernels::axpy(dt, source.data(), scratch.data(), scratch.size());
  sys.shifted_factor(dt).solve_in_place(scratch.data());
  std::swap(state, scratch);
}

// (M + dt/2 A) u_next = (M - dt/2 A) u + dt/2 (source_prev + source_next)
void trapezoid_core(const ParabolicSystem& sys, Vec& state, double dt,
                    Vec& scratch, Vec& stiff_apply, const Vec& source_prev,
                    const Vec& source_next) {
  const double half = 0.5 * dt;
  scratch.resize(state.size());
  stiff_apply.resize(state.size());
  sys.mass().multiply(state.data(), scratch.data());
  sys.stiffness().multiply(state.data(), stiff_apply.data());
  kernels::axpy(-half, stiff_apply.data(), scratch.data(), scratch.size());
  kernels::axpy(half, source_prev.data(), scratch.data(), scratch.size());
  kernels::axpy(half, source_next.data(), scratch.data(), scratch.size());
  sys.shifted_factor(half).solve_in_place(scratch.data());
  std::swap(state, scratch);
}

}  // namespace

void run_steps(const ParabolicSystem& system, const SchemeConfig& scheme,
               Vec& state, double t0, double dt, int steps,
               long global_offset) {
  scheme.validate();
  require(dt != 0.0, "time step must be nonzero");
  require(steps >= 0, "step count must be nonnegative, got ", steps);
  require(int(state.size()) == system.dim(), "state has ", state.size(),
          " entries, the system has ", system.dim());
  const bool trapezoid = scheme.scheme == Scheme::crank_nicolson;
  Vec scratch, stiff_apply, source_prev, source_next;
  if (trapezoid) system.load_at(t0, source_prev);
  for (int j = 0; j < steps; ++j) {
    const long g = global_offset + j;
    const double t_next = t0 + (j + 1) * dt;
    try {
      system.load_at(t_next, source_next);
      if (!trapezoid) {
        implicit_euler_core(system, state, dt, scratch, source_next);
      } else {
        if (g < scheme.startup_steps)  // damped start before second order
          implicit_euler_core(system, state, dt, scratch, source_next);
        else
          trapezoid_core(system, state, dt, scratch, stiff_apply, source_prev,
                         source_next);
        std::swap(source_prev, source_next);
      }
    } catch (const Error& e) {
      fail("time step ", g, " (t = ", t_next, ") failed: ", e.what());
    }
  }
}

FineSystem::FineSystem(const TwoLevelGrid& grid, const AssembledOperator& mass,
                       const AssembledOperator& stiffness,
                       const ProblemData& data)
    : grid_(&grid), mass_(&mass), stiffness_(&stiffness), data_(data) {
  require(mass.dim() == grid.interior_count() &&
              stiffness.dim() == grid.interior_count(),
          "operators were assembled on a different grid");
  require(bool(data.u0), "problem data has no initial condition");
  require(data.zero_source || bool(data.f),
          "problem data has no source function");
  if (data.time_constant_source && !data.zero_source) {
    constant_load_ = assemble_load(grid, mass, data.f, 0.0);
    constant_ready_ = true;
  }
}

const BandCholesky& FineSystem::shifted_factor(double c) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(c);
  if (it == cache_.end()) {
    CooBuilder coo(dim(), dim());
    const CsrMatrix& m = mass_->interior;
    const CsrMatrix& a = stiffness_->interior;
    for (int i = 0; i < m.rows; ++i)
      for (std::int32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
        coo.add(i, m.col_idx[k], m.vals[k]);
    for (int i = 0; i < a.rows; ++i)
      for (std::int32_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
        coo.add(i, a.col_idx[k], c * a.vals[k]);
    auto chol = std::make_shared<BandCholesky>();
    BandFactorInfo info = chol->factor(BandMatrix::from_csr(coo.compress()));
    require(info.ok, "fine operator shifted by ", c,
            " is not positive definite (pivot failed at column ",
            info.fail_index, ")");
    it = cache_.emplace(c, std::move(chol)).first;
  }
  return *it->second;
}

void FineSystem::load_at(double t, Vec& out) const {
  if (data_.zero_source) {
    out.assign(std::size_t(dim()), 0.0);
    return;
  }
  if (constant_ready_) {
    out = constant_load_;
    return;
  }
  out = assemble_load(*grid_, *mass_, data_.f, t);
}

Vec FineSystem::initial_state() const {
  return nodal_interpolate(*grid_, data_.u0);
}

ReducedSystem::ReducedSystem(const MultiscaleSpace& space,
                             const ProblemData& data)
    : space_(&space), data_(data) {
  require(bool(data.u0), "problem data has no initial condition");
  require(data.zero_source || bool(data.f),
          "problem data has no source function");
  if (data.time_constant_source && !data.zero_source) {
    constant_load_ = space.basis().transpose_multiply(
        assemble_load(space.grid(), space.mass_operator(), data.f, 0.0));
    constant_ready_ = true;
  }
}

void ReducedSystem::load_at(double t, Vec& out) const {
  if (data_.zero_source) {
    out.assign(std::size_t(dim()), 0.0);
    return;
  }
  if (constant_ready_) {
    out = constant_load_;
    return;
  }
  Vec fine =
      assemble_load(space_->grid(), space_->mass_operator(), data_.f, t);
  out.resize(std::size_t(dim()));
  space_->basis().transpose_multiply(fine.data(), out.data());
}

Vec ReducedSystem::initial_state() const {
  return space_->project_l2(nodal_interpolate(space_->grid(), data_.u0));
}

namespace {

Trajectory sequential_trajectory(const ParabolicSystem& sys,
                                 const SchemeConfig& scheme, const TimeGrid& tg,
                                 Vec state) {
  Trajectory out;
  out.times.reserve(std::size_t(tg.intervals) + 1);
  out.states.reserve(std::size_t(tg.intervals) + 1);
  out.times.push_back(0.0);
  out.states.push_back(state);
  for (int n = 0; n < tg.intervals; ++n) {
    run_steps(sys, scheme, state, tg.coarse_time(n), tg.fine_step, tg.ratio,
              long(n) * tg.ratio);
    out.times.push_back(tg.coarse_time(n + 1));
    out.states.push_back(state);
  }
  return out;
}

}  // namespace

Trajectory fine_reference_solve(const FineSystem& system,
                                const SchemeConfig& scheme,
                                const TimeGrid& tg) {
  return sequential_trajectory(system, scheme, tg, system.initial_state());
}

Trajectory multiscale_sequential_solve(const ReducedSystem& system,
                                       const SchemeConfig& scheme,
                                       const TimeGrid& tg) {
  return sequential_trajectory(system, scheme, tg, system.initial_state());
}

Vec coarse_propagate(const ReducedSystem& system, const Vec& state, double tn,
                     double coarse_step) {
  require(coarse_step > 0, "coarse step must be positive, got ", coarse_step);
  require(int(state.size()) == system.dim(), "state has ", state.size(),
          " entries, the system has ", system.dim());
  Vec u = state, scratch, source;
  const double t_next = tn + coarse_step;
  try {
    system.load_at(t_next, source);
    implicit_euler_core(system, u, coarse_step, scratch, source);
  } catch (const Error& e) {
    fail("coarse step from t = ", tn, " failed: ", e.what());
  }
  return u;
}

Vec fine_propagate(const ReducedSystem& system, const SchemeConfig& scheme,
                   const Vec& state, double tn, double coarse_step,
                   double fine_step) {
  require(coarse_step > 0 && fine_step > 0,
          "window and fine step must be positive");
  require(tn >= 0, "window start must be nonnegative, got ", tn);
  const long q = std::llround(coarse_step / fine_step);
  require(q >= 1 && std::abs(double(q) * fine_step - coarse_step) <=
                        1e-9 * coarse_step,
          "fine step ", fine_step, " does not divide the window ", coarse_step);
  const long offset = std::llround(tn / fine_step);
  Vec u = state;
  run_steps(system, scheme, u, tn, fine_step, int(q), offset);
  return u;
}

Vec jump_operator(const ReducedSystem& system, const SchemeConfig& scheme,
                  const Vec& state, double tn, double coarse_step,
                  double fine_step) {
  Vec fine = fine_propagate(system, scheme, state, tn, coarse_step, fine_step);
  const Vec coarse = coarse_propagate(system, state, tn, coarse_step);
  for (std::size_t i = 0; i < fine.size(); ++i) fine[i] -= coarse[i];
  return fine;
}

}  // namespace mspar
