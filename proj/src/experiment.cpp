#include "mspar/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <utility>

#include "mspar/util.hpp"

namespace mspar {

namespace {

constexpr double kPi = 3.14159265358979323846;

Scheme scheme_from_text(const std::string& text) {
  if (text == "backward_euler") return Scheme::backward_euler;
  if (text == "crank_nicolson") return Scheme::crank_nicolson;
  fail("unknown scheme \"", text,
       "\" (expected backward_euler or crank_nicolson)");
}

const char* scheme_to_text(Scheme scheme) {
  return scheme == Scheme::backward_euler ? "backward_euler"
                                          : "crank_nicolson";
}

}  // namespace

void ExperimentConfig::validate() const {
  require(nc >= 2, "need at least 2 coarse cells per axis, got ", nc);
  require(refine >= 2, "need at least 2 fine cells per coarse cell, got ",
          refine);
  require(level >= 0, "hierarchy depth must be nonnegative, got ", level);
  require((1 << level) <= refine, "hierarchy depth ", level,
          " does not fit ", refine, " fine cells per coarse edge");
  // the same checks the solvers make, surfaced before any work starts
  (void)TimeGrid::create(final_time, coarse_step, fine_step);
  (void)TimeGrid::create(final_time, coarse_step, reference_step);
  require(reference_step <= fine_step,
          "reference step ", reference_step,
          " must not exceed the fine step ", fine_step);
  scheme_config().validate();
  require(source == "nonzero" || source == "zero",
          "unknown source preset \"", source, "\"");
  require(coefficient == "homogeneous" || coefficient == "inclusions" ||
              coefficient == "file",
          "unknown coefficient source \"", coefficient, "\"");
  if (coefficient == "file")
    require(!coefficient_file.empty(),
            "coefficient source \"file\" needs coefficient_file");
  require(tolerance > 0, "stopping tolerance must be positive, got ",
          tolerance);
  require(kmax >= 1, "iteration budget must be positive, got ", kmax);
  require(threads >= 1, "worker count must be positive, got ", threads);
  require(!outdir.empty(), "output directory must be set");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"exp1", "exp2", "exp3",
                                                 "zero-be", "zero-cn"};
  return names;
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "exp1") {
    // driven problem, window/step ratio 100, first order
  } else if (name == "exp2") {
    cfg.scheme = Scheme::crank_nicolson;
  } else if (name == "exp3") {
    cfg.coarse_step = 1e-2;
  } else if (name == "zero-be" || name == "zero-cn") {
    cfg.source = "zero";
    cfg.final_time = 0.1;
    cfg.coarse_step = 1e-2;
    cfg.reference_step = 1e-3;
    if (name == "zero-cn") cfg.scheme = Scheme::crank_nicolson;
  } else {
    fail("unknown preset \"", name,
         "\" (expected exp1, exp2, exp3, zero-be or zero-cn)");
  }
  cfg.outdir = concat("out-", name);
  return cfg;
}

ProblemData preset_nonzero_source() {
  ProblemData d;
  d.u0 = [](double x, double y) { return x * (1 - x) * y * (1 - y); };
  d.f = [](double x, double y, double t) {
    return 200.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y) *
           std::sin(10.0 * kPi * t * x);
  };
  d.final_time = 1.0;
  return d;
}

ProblemData preset_zero_source() {
  ProblemData d;
  d.u0 = [](double x, double y) { return x * (1 - x) * y * (1 - y); };
  d.zero_source = true;
  d.final_time = 0.1;
  return d;
}

ProblemData source_for(const ExperimentConfig& cfg) {
  ProblemData d =
      cfg.source == "zero" ? preset_zero_source() : preset_nonzero_source();
  d.final_time = cfg.final_time;
  return d;
}

const std::vector<Inclusion>& default_inclusions() {
  // one blob per chosen cell of the 16x16 lattice, kept one sixty-fourth
  // away from every cell edge so no blob touches a lattice line
  static const std::vector<Inclusion> layout = [] {
    auto box = [](int cx, int cy, double v) {
      return Inclusion::rect((4 * cx + 1) / 64.0, (4 * cy + 1) / 64.0,
                             (4 * cx + 3) / 64.0, (4 * cy + 3) / 64.0, v);
    };
    auto dot = [](int cx, int cy, double v) {
      return Inclusion::disc((2 * cx + 1) / 32.0, (2 * cy + 1) / 32.0, 0.0125,
                             v);
    };
    std::vector<Inclusion> inc;
    inc.push_back(box(2, 3, 1e4));
    inc.push_back(box(5, 2, 1e3));
    inc.push_back(dot(9, 2, 1e4));
    inc.push_back(box(12, 3, 1e3));
    inc.push_back(dot(3, 6, 1e3));
    inc.push_back(box(7, 5, 1e4));
    inc.push_back(box(11, 6, 1e4));
    inc.push_back(dot(13, 8, 1e3));
    inc.push_back(box(2, 10, 1e3));
    inc.push_back(box(6, 9, 1e4));
    inc.push_back(dot(9, 11, 1e4));
    inc.push_back(box(12, 12, 1e4));
    inc.push_back(box(4, 13, 1e4));
    inc.push_back(dot(8, 13, 1e3));
    return inc;
  }();
  return layout;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail("experiment config is not valid JSON: ", e.what());
  }
  require(j.is_object(), "experiment config must be a JSON object");

  ExperimentConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "nc") {
        cfg.nc = value.get<int>();
      } else if (key == "refine") {
        cfg.refine = value.get<int>();
      } else if (key == "level") {
        cfg.level = value.get<int>();
      } else if (key == "final_time") {
        cfg.final_time = value.get<double>();
      } else if (key == "coarse_step") {
        cfg.coarse_step = value.get<double>();
      } else if (key == "fine_step") {
        cfg.fine_step = value.get<double>();
      } else if (key == "reference_step") {
        cfg.reference_step = value.get<double>();
      } else if (key == "scheme") {
        cfg.scheme = scheme_from_text(value.get<std::string>());
      } else if (key == "startup_steps") {
        cfg.startup_steps = value.get<int>();
      } else if (key == "source") {
        cfg.source = value.get<std::string>();
      } else if (key == "coefficient") {
        cfg.coefficient = value.get<std::string>();
      } else if (key == "inclusions") {
        nlohmann::json wrap;
        wrap["inclusions"] = value;
        cfg.inclusions = inclusions_from_json_text(wrap.dump());
      } else if (key == "coefficient_file") {
        cfg.coefficient_file = value.get<std::string>();
      } else if (key == "tolerance") {
        cfg.tolerance = value.get<double>();
      } else if (key == "kmax") {
        cfg.kmax = value.get<int>();
      } else if (key == "threads") {
        cfg.threads = value.get<int>();
      } else if (key == "outdir") {
        cfg.outdir = value.get<std::string>();
      } else if (key == "seed") {
        cfg.seed = value.get<unsigned>();
      } else {
        fail("experiment config has unknown key \"", key, "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail("experiment config field has the wrong type: ", e.what());
  }
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["nc"] = cfg.nc;
  j["refine"] = cfg.refine;
  j["level"] = cfg.level;
  j["final_time"] = cfg.final_time;
  j["coarse_step"] = cfg.coarse_step;
  j["fine_step"] = cfg.fine_step;
  j["reference_step"] = cfg.reference_step;
  j["scheme"] = scheme_to_text(cfg.scheme);
  j["startup_steps"] = cfg.startup_steps;
  j["source"] = cfg.source;
  j["coefficient"] = cfg.coefficient;
  if (!cfg.inclusions.empty())
    j["inclusions"] =
        nlohmann::json::parse(inclusions_to_json_text(cfg.inclusions))
            .at("inclusions");
  if (!cfg.coefficient_file.empty())
    j["coefficient_file"] = cfg.coefficient_file;
  j["tolerance"] = cfg.tolerance;
  j["kmax"] = cfg.kmax;
  j["threads"] = cfg.threads;
  j["outdir"] = cfg.outdir;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

RelativeError relative_error(const CsrMatrix& weight, const Vec& reference,
                             const Vec& candidate) {
  require(reference.size() == candidate.size(),
          "compared states have different dimensions (", reference.size(),
          " vs ", candidate.size(), ")");
  Vec diff(reference.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = candidate[i] - reference[i];
  const double den = weighted_norm(weight, reference);
  if (den == 0.0) return {0.0, false};
  return {weighted_norm(weight, diff) / den * 100.0, true};
}

int ErrorTable::undefined_entries() const {
  int count = 0;
  for (const auto& row : rows)
    for (const RelativeError& e : row)
      if (!e.defined) ++count;
  return count;
}

ErrorTable build_error_table(const Trajectory& reference,
                             const Trajectory& sequential,
                             const std::vector<PararealState>& iterates,
                             const MultiscaleSpace& space,
                             const CsrMatrix& weight) {
  require(reference.states.size() >= 2, "reference trajectory has no windows");
  const std::size_t levels = reference.states.size();
  require(sequential.states.size() == levels,
          "sequential trajectory has ", sequential.states.size(),
          " levels, reference has ", levels);
  require(!iterates.empty(), "no iterates to tabulate");
  for (const PararealState& it : iterates)
    require(it.states.size() == levels, "iterate ", it.k, " has ",
            it.states.size(), " levels, reference has ", levels);

  ErrorTable table;
  table.columns.push_back("Rel_EW");
  for (std::size_t k = 0; k < iterates.size(); ++k)
    table.columns.push_back(concat("Rel_", iterates[k].k));

  for (std::size_t n = 1; n < levels; ++n) {
    const Vec& ref = reference.states[n];
    table.times.push_back(reference.times[n]);
    std::vector<RelativeError> row;
    row.push_back(
        relative_error(weight, ref, space.reconstruct(sequential.states[n])));
    for (const PararealState& it : iterates)
      row.push_back(
          relative_error(weight, ref, space.reconstruct(it.states[n])));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_error_table_csv(std::ostream& os, const ErrorTable& table) {
  os << "T_n";
  for (const std::string& c : table.columns) os << ',' << c;
  os << '\n';
  for (std::size_t n = 0; n < table.rows.size(); ++n) {
    os << format_double(table.times[n]);
    for (const RelativeError& e : table.rows[n])
      if (e.defined)
        os << ',' << format_double(e.value);
      else
        os << ",undefined";
    os << '\n';
  }
}

ErrorTable parse_error_table_csv(std::istream& is) {
  auto split = [](const std::string& line) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      parts.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return parts;
  };

  std::string line;
  require(bool(std::getline(is, line)), "error table is empty");
  std::vector<std::string> header = split(line);
  require(header.size() >= 2 && header[0] == "T_n",
          "error table header must start with T_n");

  ErrorTable table;
  table.columns.assign(header.begin() + 1, header.end());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts = split(line);
    require(parts.size() == header.size(), "error table row has ",
            parts.size(), " fields, header has ", header.size());
    table.times.push_back(std::strtod(parts[0].c_str(), nullptr));
    std::vector<RelativeError> row;
    for (std::size_t c = 1; c < parts.size(); ++c) {
      if (parts[c] == "undefined")
        row.push_back({0.0, false});
      else
        row.push_back({std::strtod(parts[c].c_str(), nullptr), true});
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.config = cfg;

  std::vector<std::pair<std::string, std::string>> stages;
  auto run_stage = [&](const char* name, auto&& body) {
    if (!res.failed_stage.empty()) {
      stages.emplace_back(name, "skipped");
      return false;
    }
    try {
      body();
      stages.emplace_back(name, "ok");
      return true;
    } catch (const std::exception& e) {
      res.failed_stage = name;
      res.failure = e.what();
      stages.emplace_back(name, concat("failed: ", e.what()));
      return false;
    }
  };
  auto emit = [&](const std::string& relpath, const std::string& content) {
    write_text_file(concat(cfg.outdir, "/", relpath), content);
    res.files.push_back(relpath);
  };

  std::unique_ptr<TwoLevelGrid> grid;
  std::unique_ptr<CoefficientField> field;
  std::unique_ptr<AssembledOperator> mass, stiff;
  std::unique_ptr<MultiscaleSpace> space;
  std::unique_ptr<FineSystem> fine_sys;
  std::unique_ptr<ReducedSystem> red_sys;
  ProblemData data;
  Trajectory reference, sequential;
  std::vector<PararealState> tabulated;
  std::vector<int> snapshot_windows;

  run_stage("setup", [&] {
    std::filesystem::create_directories(cfg.outdir);
    grid = std::make_unique<TwoLevelGrid>(build_grid(cfg.nc, cfg.refine));
    if (cfg.coefficient == "homogeneous") {
      field = std::make_unique<CoefficientField>(uniform_field(*grid, 1.0));
    } else if (cfg.coefficient == "file") {
      field = std::make_unique<CoefficientField>(
          load_field_text(*grid, cfg.coefficient_file));
    } else {
      const std::vector<Inclusion>& inc =
          cfg.inclusions.empty() ? default_inclusions() : cfg.inclusions;
      field = std::make_unique<CoefficientField>(
          build_inclusion_field(*grid, inc));
    }
    save_field_text(*field, concat(cfg.outdir, "/coefficient.txt"));
    res.files.push_back("coefficient.txt");
    mass = std::make_unique<AssembledOperator>(assemble_mass(*grid));
    stiff = std::make_unique<AssembledOperator>(
        assemble_stiffness(*grid, *field));
    space = std::make_unique<MultiscaleSpace>(assemble_multiscale_space(
        *grid, *field, *mass, *stiff, {cfg.level, 1e-10, {}}));
    data = source_for(cfg);
    fine_sys = std::make_unique<FineSystem>(*grid, *mass, *stiff, data);
    red_sys = std::make_unique<ReducedSystem>(*space, data);
  });

  run_stage("reference", [&] {
    TimeGrid tg = TimeGrid::create(cfg.final_time, cfg.coarse_step,
                                   cfg.reference_step);
    reference = fine_reference_solve(*fine_sys, SchemeConfig{}, tg);
  });

  TimeGrid tg{};  // the run's own window layout, set once setup succeeded
  run_stage("sequential", [&] {
    tg = TimeGrid::create(cfg.final_time, cfg.coarse_step, cfg.fine_step);
    sequential = multiscale_sequential_solve(*red_sys, cfg.scheme_config(), tg);
  });

  run_stage("parareal", [&] {
    PararealOptions opt;
    opt.tolerance = cfg.tolerance;
    opt.max_iterations = cfg.kmax;
    opt.threads = cfg.threads;
    opt.keep_history = true;
    res.report = run_parareal(*red_sys, cfg.scheme_config(), tg, opt);
    // a converged final iterate sits within tolerance of the previous one
    // and adds no information, so the tables stop one column earlier
    const int last = res.report.converged ? res.report.final_k - 1
                                          : res.report.final_k;
    tabulated.assign(res.report.history.begin(),
                     res.report.history.begin() + (last + 1));
  });

  run_stage("tables", [&] {
    res.table_l2 = build_error_table(reference, sequential, tabulated, *space,
                                     mass->interior);
    std::ostringstream l2;
    write_error_table_csv(l2, res.table_l2);
    emit("errors_l2.csv", l2.str());

    res.table_h1k = build_error_table(reference, sequential, tabulated,
                                      *space, stiff->interior);
    std::ostringstream h1k;
    write_error_table_csv(h1k, res.table_h1k);
    emit("errors_h1k.csv", h1k.str());
  });

  run_stage("convergence", [&] {
    std::ostringstream os;
    write_convergence_csv(os, res.report);
    emit("convergence.csv", os.str());
  });

  run_stage("snapshots", [&] {
    const double display[4] = {0.1, 0.3, 0.5, 1.0};
    for (double frac : display) {
      const double t = frac * cfg.final_time;
      const int n = int(std::llround(t / cfg.coarse_step));
      if (n < 1 || n > tg.intervals) continue;
      if (std::abs(n * cfg.coarse_step - t) > 1e-9 * cfg.final_time) continue;
      snapshot_windows.push_back(n);
    }
    for (int n : snapshot_windows) {
      auto write_snap = [&](const std::string& tag, const Vec& interior) {
        std::ostringstream os;
        write_grid_field(os, *grid, interior);
        emit(concat("snapshot_", tag, "_n", n, ".txt"), os.str());
      };
      write_snap("reference", reference.states[std::size_t(n)]);
      write_snap("ew", space->reconstruct(sequential.states[std::size_t(n)]));
      for (const PararealState& it : tabulated)
        write_snap(concat("k", it.k),
                   space->reconstruct(it.states[std::size_t(n)]));
    }
  });

  // the manifest is written even after a failure, so a broken run still
  // documents what it managed to produce
  try {
    nlohmann::ordered_json m;
    m["config"] = nlohmann::ordered_json::parse(config_to_json_text(cfg));
    nlohmann::ordered_json st = nlohmann::ordered_json::array();
    for (const auto& [name, status] : stages)
      st.push_back({{"stage", name}, {"status", status}});
    m["stages"] = st;
    m["ok"] = res.failed_stage.empty();
    if (grid) {
      m["fine_dim"] = grid->interior_count();
      if (space) m["reduced_dim"] = space->dim();
    }
    if (!res.report.history.empty()) {
      m["error_norm"] = res.report.error_norm;
      m["initial_sweep_ms"] = res.report.initial_sweep_ms;
      m["final_k"] = res.report.final_k;
      m["converged"] = res.report.converged;
      m["err_history"] = res.report.err_history;
      nlohmann::ordered_json its = nlohmann::ordered_json::array();
      for (const IterationStats& it : res.report.iterations)
        its.push_back({{"k", it.k},
                       {"err", it.error},
                       {"wall_fine_ms", it.wall_fine_ms},
                       {"wall_coarse_ms", it.wall_coarse_ms}});
      m["iterations"] = its;
      m["tabulated_iterates"] = tabulated.size();
    }
    if (!res.table_l2.rows.empty())
      m["undefined_entries"] = {{"l2", res.table_l2.undefined_entries()},
                                {"h1k", res.table_h1k.undefined_entries()}};
    m["snapshot_windows"] = snapshot_windows;
    m["files"] = res.files;
    std::filesystem::create_directories(cfg.outdir);
    write_text_file(concat(cfg.outdir, "/manifest.json"), m.dump(2) + "\n");
    res.files.push_back("manifest.json");
    stages.emplace_back("manifest", "ok");
  } catch (const std::exception& e) {
    if (res.failed_stage.empty()) {
      res.failed_stage = "manifest";
      res.failure = e.what();
    }
  }

  res.ok = res.failed_stage.empty();
  return res;
}

}  // namespace mspar
