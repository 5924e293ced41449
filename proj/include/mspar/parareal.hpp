#pragma once

#include <iosfwd>

#include "mspar/time_integration.hpp"

namespace mspar {

struct PararealOptions {
  double tolerance = 1e-8;  // stop once the mean iterate change falls below
  int max_iterations = -1;  // -1: one iteration per coarse window
  int threads = 1;          // workers for the fine propagation phase
  bool mass_weighted_error = false;  // stopping error in the reduced M-norm
  bool keep_history = false;         // retain every iterate, not just the last

  void validate() const;
};

// One iterate of the time-parallel scheme: the trajectory over the coarse
// points plus the coarse propagations of its own states, which the next
// iterate reuses when forming jumps. fine_cache holds the fine propagations
// of the PREVIOUS iterate's states, the parallel phase that built this one
// (empty at k = 0).
struct PararealState {
  int k = 0;
  std::vector<Vec> states;        // U^n, n = 0..intervals
  std::vector<Vec> coarse_cache;  // E(T^n, U^n), n = 0..intervals-1
  std::vector<Vec> fine_cache;    // F(T^n, U_prev^n), n = 0..intervals-1
  Vec err_history;                // stopping errors up to this iterate
};

struct IterationStats {
  int k = 0;
  double error = 0.0;          // change against the previous iterate
  double wall_fine_ms = 0.0;   // parallel fine-propagation phase
  double wall_coarse_ms = 0.0; // sequential correction sweep
};

struct PararealReport {
  int final_k = 0;
  bool converged = false;  // tolerance reached within max_iterations
  Vec err_history;
  double initial_sweep_ms = 0.0;
  std::vector<IterationStats> iterations;  // k = 1..final_k
  std::string error_norm;                  // norm used by the stopping test
  // all iterates when keep_history is set, otherwise just the last one
  std::vector<PararealState> history;

  const PararealState& final_state() const { return history.back(); }
};

// Sequential coarse sweep from the projected initial data: U_0^{n+1} =
// E(T^n, U_0^n), with the propagated values retained for jump formation.
PararealState initial_coarse_sweep(const ReducedSystem& system,
                                   const TimeGrid& tg);

// One update U_{k+1}^{n+1} = F(T^n, ΔT, U_k^n) - E(T^n, U_k^n) +
// E(T^n, U_{k+1}^n): fine propagations of all windows run in parallel
// (results land in fixed slots, so the schedule cannot change the output),
// jumps reuse the cached coarse values of the incoming iterate, and the
// correction sweep is sequential in n.
PararealState parareal_iterate(const PararealState& state,
                               const ReducedSystem& system,
                               const SchemeConfig& scheme, const TimeGrid& tg,
                               int threads, IterationStats* stats = nullptr);

// Mean over n = 1..intervals of the coefficient-vector distance between
// consecutive iterates; plain Euclidean unless a weight matrix is given.
double stopping_error(const PararealState& previous, const PararealState& next,
                      const CsrMatrix* weight = nullptr);

// Full iteration: coarse sweep, then updates until the stopping error drops
// to the tolerance or the iteration budget is spent (reported, not fatal).
PararealReport run_parareal(const ReducedSystem& system,
                            const SchemeConfig& scheme, const TimeGrid& tg,
                            const PararealOptions& options);

// Convergence history as strict CSV: k,err,wall_coarse_ms,wall_fine_ms, one
// row per update; the initial sweep is reported separately.
void write_convergence_csv(std::ostream& os, const PararealReport& report);

}  // namespace mspar
