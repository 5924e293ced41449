#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mspar/parareal.hpp"

namespace mspar {

// One experiment run, fully resolved: discretization, scheme, problem data
// selection, iteration budget and output location. JSON configs mirror the
// field names one to one.
struct ExperimentConfig {
  int nc = 16;      // coarse cells per axis
  int refine = 8;   // fine cells per coarse cell
  int level = 2;    // edge hierarchy depth

  double final_time = 1.0;
  double coarse_step = 0.1;
  double fine_step = 1e-3;
  double reference_step = 1e-4;  // fine reference runs at this step

  Scheme scheme = Scheme::backward_euler;
  int startup_steps = 3;  // first-order startup steps for the trapezoid rule

  std::string source = "nonzero";         // nonzero | zero
  std::string coefficient = "inclusions";  // homogeneous | inclusions | file
  std::vector<Inclusion> inclusions;       // empty means the bundled field
  std::string coefficient_file;            // cell text, used when "file"

  double tolerance = 1e-14;
  int kmax = 4;
  int threads = 1;
  std::string outdir = "out";
  unsigned seed = 0;  // consumed by randomized harnesses only

  void validate() const;
  SchemeConfig scheme_config() const { return {scheme, startup_steps}; }
};

// Named parameter sets: exp1 (first-order, window/step ratio 100), exp2
// (trapezoid, ratio 100), exp3 (first-order, ratio 10), zero-be / zero-cn
// (decay-only problem on a short horizon).
ExperimentConfig preset_config(const std::string& name);
const std::vector<std::string>& preset_names();

// Driven problem: u0 = x(1-x)y(1-y), f = 200 pi^2 sin(pi x) sin(pi y)
// sin(10 pi t x), horizon 1.
ProblemData preset_nonzero_source();
// Decay problem: same initial bump, no source, horizon 0.1.
ProblemData preset_zero_source();
// The configured preset with the configured horizon stamped on.
ProblemData source_for(const ExperimentConfig& cfg);

// Bundled high-contrast inclusion layout: disjoint blobs strictly inside
// distinct cells of the 16x16 lattice, values 1e3 / 1e4.
const std::vector<Inclusion>& default_inclusions();

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

// Percentage relative difference in a weighted norm. A zero-norm reference
// has no meaningful percentage: the entry is flagged undefined instead.
struct RelativeError {
  double value = 0.0;
  bool defined = true;
};
RelativeError relative_error(const CsrMatrix& weight, const Vec& reference,
                             const Vec& candidate);

// Rows are window end times T^1..T^M; columns are the sequential reduced
// solution followed by one column per tabulated iterate.
struct ErrorTable {
  Vec times;
  std::vector<std::string> columns;  // "Rel_EW", "Rel_0", ...
  std::vector<std::vector<RelativeError>> rows;

  int undefined_entries() const;
};

ErrorTable build_error_table(const Trajectory& reference,
                             const Trajectory& sequential,
                             const std::vector<PararealState>& iterates,
                             const MultiscaleSpace& space,
                             const CsrMatrix& weight);
void write_error_table_csv(std::ostream& os, const ErrorTable& table);
ErrorTable parse_error_table_csv(std::istream& is);

// What run_experiment leaves behind besides files. On a stage failure the
// run stops, the manifest still lands on disk, and `ok` is false.
struct ExperimentResult {
  bool ok = false;
  std::string failed_stage;
  std::string failure;
  ExperimentConfig config;
  PararealReport report;
  ErrorTable table_l2, table_h1k;
  std::vector<std::string> files;  // paths written, relative to outdir
};

// Full pipeline: fine reference, sequential reduced solve, window-parallel
// iteration, error tables in both norms, convergence history, snapshots at
// the display times, and a JSON manifest of everything.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace mspar
