#include "mspar/parareal.hpp"

#include <cmath>
#include <ostream>
#include <utility>

#include "mspar/kernels.hpp"
#include "mspar/util.hpp"

namespace mspar {

void PararealOptions::validate() const {
  require(tolerance > 0, "stopping tolerance must be positive, got ",
          tolerance);
  require(max_iterations == -1 || max_iterations >= 1,
          "iteration budget must be -1 (one per window) or positive, got ",
          max_iterations);
  require(threads >= 1, "worker count must be positive, got ", threads);
}

PararealState initial_coarse_sweep(const ReducedSystem& system,
                                   const TimeGrid& tg) {
  require(tg.intervals >= 1, "time grid carries no coarse windows");
  PararealState st;
  st.k = 0;
  st.states.resize(std::size_t(tg.intervals) + 1);
  st.coarse_cache.resize(std::size_t(tg.intervals));
  st.states[0] = system.initial_state();
  for (int n = 0; n < tg.intervals; ++n) {
    st.states[std::size_t(n) + 1] = coarse_propagate(
        system, st.states[std::size_t(n)], tg.coarse_time(n), tg.coarse_step);
    st.coarse_cache[std::size_t(n)] = st.states[std::size_t(n) + 1];
  }
  return st;
}

PararealState parareal_iterate(const PararealState& state,
                               const ReducedSystem& system,
                               const SchemeConfig& scheme, const TimeGrid& tg,
                               int threads, IterationStats* stats) {
  scheme.validate();
  require(threads >= 1, "worker count must be positive, got ", threads);
  const int m = tg.intervals;
  require(int(state.states.size()) == m + 1, "iterate carries ",
          state.states.size(), " states for ", m, " windows");
  require(int(state.coarse_cache.size()) == m,
          "iterate carries ", state.coarse_cache.size(),
          " cached coarse values for ", m, " windows");

  // parallel phase: fine-propagate every window of the incoming iterate;
  // each task writes only its own slot
  const std::size_t windows = std::size_t(m);
  std::vector<Vec> fine(windows);
  std::vector<std::string> failure(windows);
  std::vector<std::uint8_t> failed(windows, 0);
  Stopwatch fine_clock;
  parallel_for(m, threads, [&](int n) {
    try {
      fine[std::size_t(n)] =
          fine_propagate(system, scheme, state.states[std::size_t(n)],
                         tg.coarse_time(n), tg.coarse_step, tg.fine_step);
    } catch (const Error& e) {
      failure[std::size_t(n)] = e.what();
      failed[std::size_t(n)] = 1;
    }
  });
  const double fine_ms = fine_clock.elapsed_ms();
  for (int n = 0; n < m; ++n)
    require(!failed[std::size_t(n)], "fine propagation failed on window ", n,
            ": ", failure[std::size_t(n)]);

  PararealState next;
  next.k = state.k + 1;
  next.err_history = state.err_history;
  next.fine_cache = std::move(fine);
  next.states.resize(std::size_t(m) + 1);
  next.coarse_cache.resize(std::size_t(m));

  // sequential correction: new coarse value plus the jump of the incoming
  // iterate, whose coarse part was cached when that iterate was built
  Stopwatch sweep_clock;
  next.states[0] = state.states[0];
  for (int n = 0; n < m; ++n) {
    Vec e = coarse_propagate(system, next.states[std::size_t(n)],
                             tg.coarse_time(n), tg.coarse_step);
    const Vec& f = next.fine_cache[std::size_t(n)];
    const Vec& cached = state.coarse_cache[std::size_t(n)];
    Vec& out = next.states[std::size_t(n) + 1];
    out.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i)
      out[i] = f[i] - cached[i] + e[i];
    next.coarse_cache[std::size_t(n)] = std::move(e);
  }
  const double coarse_ms = sweep_clock.elapsed_ms();

  if (stats) {
    stats->k = next.k;
    stats->wall_fine_ms = fine_ms;
    stats->wall_coarse_ms = coarse_ms;
  }
  return next;
}

double stopping_error(const PararealState& previous, const PararealState& next,
                      const CsrMatrix* weight) {
  require(previous.states.size() == next.states.size(),
          "iterates carry different trajectory lengths (",
          previous.states.size(), " vs ", next.states.size(), ")");
  require(previous.states.size() >= 2, "trajectories carry no windows");
  const int m = int(previous.states.size()) - 1;
  Vec diff, wd;
  double total = 0.0;
  for (int n = 1; n <= m; ++n) {
    const Vec& a = previous.states[std::size_t(n)];
    const Vec& b = next.states[std::size_t(n)];
    require(a.size() == b.size(), "state ", n, " dimensions differ (",
            a.size(), " vs ", b.size(), ")");
    diff.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = b[i] - a[i];
    if (weight) {
      require(weight->rows == int(diff.size()) &&
                  weight->cols == int(diff.size()),
              "weight matrix does not match the state dimension");
      wd.resize(diff.size());
      weight->multiply(diff.data(), wd.data());
      total += std::sqrt(kernels::dot(diff.data(), wd.data(), diff.size()));
    } else {
      total += std::sqrt(kernels::dot(diff.data(), diff.data(), diff.size()));
    }
  }
  return total / m;
}

PararealReport run_parareal(const ReducedSystem& system,
                            const SchemeConfig& scheme, const TimeGrid& tg,
                            const PararealOptions& options) {
  options.validate();
  scheme.validate();
  const int kmax =
      options.max_iterations == -1 ? tg.intervals : options.max_iterations;

  PararealReport report;
  report.error_norm =
      options.mass_weighted_error ? "reduced-mass-weighted" : "coefficient-l2";

  // the factorizations every window shares; built before any clock starts
  system.shifted_factor(tg.coarse_step);
  if (scheme.scheme == Scheme::crank_nicolson) {
    system.shifted_factor(0.5 * tg.fine_step);
    if (scheme.startup_steps > 0) system.shifted_factor(tg.fine_step);
  } else {
    system.shifted_factor(tg.fine_step);
  }

  Stopwatch sweep_clock;
  PararealState current = initial_coarse_sweep(system, tg);
  report.initial_sweep_ms = sweep_clock.elapsed_ms();
  if (options.keep_history) report.history.push_back(current);

  const CsrMatrix* weight =
      options.mass_weighted_error ? &system.mass() : nullptr;
  for (int k = 1; k <= kmax; ++k) {
    IterationStats stats;
    PararealState next =
        parareal_iterate(current, system, scheme, tg, options.threads, &stats);
    stats.error = stopping_error(current, next, weight);
    next.err_history.push_back(stats.error);

    report.err_history.push_back(stats.error);
    report.iterations.push_back(stats);
    report.final_k = k;
    current = std::move(next);
    if (options.keep_history) report.history.push_back(current);
    if (stats.error <= options.tolerance) {
      report.converged = true;
      break;
    }
  }
  if (!options.keep_history) report.history.push_back(std::move(current));
  return report;
}

void write_convergence_csv(std::ostream& os, const PararealReport& report) {
  os << "k,err,wall_coarse_ms,wall_fine_ms\n";
  for (const IterationStats& it : report.iterations)
    os << it.k << ',' << format_double(it.error) << ','
       << format_double(it.wall_coarse_ms) << ','
       << format_double(it.wall_fine_ms) << '\n';
}

}  // namespace mspar
