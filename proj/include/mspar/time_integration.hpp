#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "mspar/msfem.hpp"

namespace mspar {

// Two-level uniform time discretization: `intervals` coarse windows of length
// coarse_step, each split into `ratio` fine steps.
struct TimeGrid {
  double final_time = 0.0;
  double coarse_step = 0.0;
  double fine_step = 0.0;
  int intervals = 0;  // coarse windows over [0, final_time]
  int ratio = 0;      // fine steps per window

  // Validates divisibility: intervals * coarse_step = final_time and
  // ratio * fine_step = coarse_step to round-off, ratio >= 2.
  static TimeGrid create(double final_time, double coarse_step,
                         double fine_step);
  double coarse_time(int n) const { return n * coarse_step; }
};

enum class Scheme { backward_euler, crank_nicolson };

struct SchemeConfig {
  Scheme scheme = Scheme::backward_euler;
  // number of backward Euler steps taken at the very beginning of the
  // simulation (global fine-step indices 0..startup_steps-1) before
  // Crank-Nicolson engages; ignored for backward Euler
  int startup_steps = 3;

  void validate() const;
};

// Mass/stiffness pair with cached shifted factorizations and a load
// assembler: the one interface the steppers run on, either over fine
// interior dofs or over multiscale coefficients.
class ParabolicSystem {
 public:
  virtual ~ParabolicSystem() = default;
  virtual int dim() const = 0;
  virtual const CsrMatrix& mass() const = 0;
  virtual const CsrMatrix& stiffness() const = 0;
  // factorization of (mass + c * stiffness), built once per shift and
  // cached; safe to call concurrently
  virtual const BandCholesky& shifted_factor(double c) const = 0;
  // load vector of the source at time t; constant and zero sources are
  // served from a precomputed vector
  virtual void load_at(double t, Vec& out) const = 0;
  Vec load_at(double t) const {
    Vec v;
    load_at(t, v);
    return v;
  }
};

// Fine-grid parabolic problem over interior dofs.
class FineSystem : public ParabolicSystem {
 public:
  FineSystem(const TwoLevelGrid& grid, const AssembledOperator& mass,
             const AssembledOperator& stiffness, const ProblemData& data);

  using ParabolicSystem::load_at;
  int dim() const override { return mass_->dim(); }
  const CsrMatrix& mass() const override { return mass_->interior; }
  const CsrMatrix& stiffness() const override { return stiffness_->interior; }
  const BandCholesky& shifted_factor(double c) const override;
  void load_at(double t, Vec& out) const override;

  const TwoLevelGrid& grid() const { return *grid_; }
  const ProblemData& data() const { return data_; }
  Vec initial_state() const;  // nodal interpolant of u0

 private:
  const TwoLevelGrid* grid_;
  const AssembledOperator* mass_;
  const AssembledOperator* stiffness_;
  ProblemData data_;
  Vec constant_load_;
  bool constant_ready_ = false;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const BandCholesky>> cache_;
};

// The same problem projected onto a multiscale space; states are basis
// coefficients and the operators are the reduced mass and stiffness.
class ReducedSystem : public ParabolicSystem {
 public:
  ReducedSystem(const MultiscaleSpace& space, const ProblemData& data);

  using ParabolicSystem::load_at;
  int dim() const override { return space_->dim(); }
  const CsrMatrix& mass() const override { return space_->reduced_mass(); }
  const CsrMatrix& stiffness() const override {
    return space_->reduced_stiffness();
  }
  const BandCholesky& shifted_factor(double c) const override {
    return space_->shifted_factor(c);
  }
  void load_at(double t, Vec& out) const override;

  const MultiscaleSpace& space() const { return *space_; }
  const ProblemData& data() const { return data_; }
  Vec initial_state() const;  // M-orthogonal projection of the u0 interpolant

 private:
  const MultiscaleSpace* space_;
  ProblemData data_;
  Vec constant_load_;
  bool constant_ready_ = false;
};

// States sampled at the coarse time points 0..intervals.
struct Trajectory {
  Vec times;
  std::vector<Vec> states;
};

// Advances `state` in place by `steps` steps of size dt starting at time t0.
// global_offset is the index of the first step counted from the start of the
// whole simulation; Crank-Nicolson runs backward Euler for global indices
// below startup_steps. Solver failures are reported with the step index.
void run_steps(const ParabolicSystem& system, const SchemeConfig& scheme,
               Vec& state, double t0, double dt, int steps, long global_offset);

// Sequential fine-grid reference over the whole horizon, sampled at the
// coarse points.
Trajectory fine_reference_solve(const FineSystem& system,
                                const SchemeConfig& scheme, const TimeGrid& tg);

// Sequential solve on the multiscale coefficients with the fine step.
Trajectory multiscale_sequential_solve(const ReducedSystem& system,
                                       const SchemeConfig& scheme,
                                       const TimeGrid& tg);

// One backward Euler step of size coarse_step from time tn, load taken at
// tn + coarse_step.
Vec coarse_propagate(const ReducedSystem& system, const Vec& state, double tn,
                     double coarse_step);

// coarse_step/fine_step steps of the configured fine scheme from time tn.
// Pure function of its arguments; calls for distinct windows may run
// concurrently.
Vec fine_propagate(const ReducedSystem& system, const SchemeConfig& scheme,
                   const Vec& state, double tn, double coarse_step,
                   double fine_step);

// Difference fine minus coarse propagation of the same state.
Vec jump_operator(const ReducedSystem& system, const SchemeConfig& scheme,
                  const Vec& state, double tn, double coarse_step,
                  double fine_step);

}  // namespace mspar
