#include "fastfrechet/cli.hpp"

#include "fastfrechet/bench.hpp"
#include "fastfrechet/datagen.hpp"
#include "fastfrechet/errors.hpp"
#include "fastfrechet/frechet.hpp"
#include "fastfrechet/friso.hpp"
#include "fastfrechet/io.hpp"
#include "fastfrechet/parallel.hpp"
#include "fastfrechet/resampling.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

namespace fastfrechet::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::size_t threads = 0;
  bool verbose = false;

  std::string x_path;
  std::string y_path;
  std::string out_path;
  std::string lower = "-inf";
  std::string upper = "inf";
  std::string format;

  // simulate
  std::size_t n = 100;
  std::size_t m = 100;
  std::size_t p = 10;
  std::uint64_t seed = 1;
  std::string out_x;
  std::string out_y;

  // fit
  std::string active_sets_path;

  // select / path / cv / stability
  double tau = 0.0;
  std::string tau_grid = "0.5:10:0.5";
  DescentConfig descent;
  bool cold = false;
  std::size_t folds = 5;
  std::size_t replicates = 50;
  double pi_threshold = 0.9;
  double cutoff = 0.01;

  // bench
  std::string task = "fit";
  std::size_t reps = 15;
};

// Writes to the named file, or to `fallback` when the name is empty or "-".
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    fallback.flush();
    return;
  }
  std::ofstream file(path);
  if (!file) {
    throw ParseError("cannot open '" + path + "' for writing");
  }
  write(file);
  if (!file) {
    throw ParseError("write to '" + path + "' failed");
  }
}

void emit_json(const std::string& path, std::ostream& fallback, const Json& j) {
  emit(path, fallback, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

class Diagnostics {
public:
  Diagnostics(bool enabled, std::ostream& err) : enabled_(enabled), err_(err) {}

  void event(Json j) const {
    if (enabled_) {
      err_ << j.dump() << '\n';
    }
  }

  IterationObserver observer() const {
    if (!enabled_) {
      return {};
    }
    return [this](const IterationRecord& rec) {
      Json j{{"event", "iteration"}};
      j.update(to_json(rec));
      event(std::move(j));
    };
  }

private:
  bool enabled_;
  std::ostream& err_;
};

SupportBounds parse_bounds(const Options& o) {
  double lo = 0.0;
  double hi = 0.0;
  try {
    lo = parse_double(o.lower);
  } catch (const InvalidArgument&) {
    throw InvalidArgument("--lower: not a number: '" + o.lower + "'");
  }
  try {
    hi = parse_double(o.upper);
  } catch (const InvalidArgument&) {
    throw InvalidArgument("--upper: not a number: '" + o.upper + "'");
  }
  if (!(lo < hi) || lo == kInf || hi == -kInf) {
    throw InvalidArgument("--lower must be smaller than --upper (got " + o.lower + " and " + o.upper +
                          ")");
  }
  return {lo, hi};
}

std::vector<double> parse_grid(const Options& o) {
  try {
    return parse_tau_grid(o.tau_grid);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("--tau-grid: ") + e.what());
  }
}

struct Inputs {
  CovariateMatrix X;
  QuantileMatrix Y;
};

Inputs load_inputs(const Options& o) {
  CsvMatrix x = read_matrix_csv(std::filesystem::path(o.x_path));
  CsvMatrix y = read_matrix_csv(std::filesystem::path(o.y_path));
  if (x.values.rows() != y.values.rows()) {
    throw InvalidArgument("--x has " + std::to_string(x.values.rows()) + " rows but --y has " +
                          std::to_string(y.values.rows()));
  }
  QuantileMatrix Y = [&] {
    try {
      return validate_quantile_matrix(std::move(y.values));
    } catch (const ValidationError& e) {
      // Data rows start on line 2 of the file.
      std::ostringstream msg;
      msg << o.y_path << ": quantile rows must be finite and non-decreasing;";
      const auto& bad = e.positions();
      for (std::size_t t = 0; t < bad.size() && t < 5; ++t) {
        msg << (t == 0 ? " " : ", ") << "row " << bad[t].first + 1 << " (line " << bad[t].first + 2
            << ") column " << bad[t].second + 1;
      }
      if (bad.size() > 5) {
        msg << " and " << bad.size() - 5 << " more";
      }
      throw ValidationError(msg.str(), bad);
    }
  }();
  return {CovariateMatrix(std::move(x.values)), std::move(Y)};
}

DescentConfig descent_config(const Options& o) {
  DescentConfig c = o.descent;
  c.threads = o.threads;
  c.validate();
  return c;
}

std::string format_or(const Options& o, const char* fallback) {
  const std::string f = o.format.empty() ? fallback : o.format;
  if (f != "csv" && f != "json") {
    throw InvalidArgument("--format must be csv or json, got '" + f + "'");
  }
  return f;
}

// Subcommand bodies.

void cmd_simulate(const Options& o, std::ostream& out, const Diagnostics& diag) {
  const SimulatedData sim = generate_zinbinom_qf(o.n, o.m, o.p, o.seed);
  write_matrix_csv(std::filesystem::path(o.out_x), sim.X.values());
  write_matrix_csv(std::filesystem::path(o.out_y), sim.Y.values());
  diag.event({{"event", "simulate"}, {"n", o.n}, {"m", o.m}, {"p", o.p}, {"seed", o.seed}});
  (void)out;
}

void cmd_fit(const Options& o, std::ostream& out, const Diagnostics& diag) {
  const SupportBounds bounds = parse_bounds(o);
  const Inputs in = load_inputs(o);
  const FrechetFit fit = fit_frechet(in.X, in.Y, bounds, o.threads);
  emit(o.out_path, out, [&](std::ostream& os) { write_matrix_csv(os, fit.Qhat.values()); });
  if (!o.active_sets_path.empty()) {
    // One row per line keeps large dumps readable and diffable.
    emit(o.active_sets_path, out, [&](std::ostream& os) {
      os << "[\n";
      for (std::size_t i = 0; i < fit.active_sets.size(); ++i) {
        os << "  " << fit.active_sets[i].to_json() << (i + 1 < fit.active_sets.size() ? ",\n" : "\n");
      }
      os << "]\n";
    });
  }
  diag.event({{"event", "fit"},
              {"n", in.X.rows()},
              {"m", in.Y.cols()},
              {"p", in.X.cols()},
              {"qp_iterations", fit.qp_iterations}});
}

void cmd_select(const Options& o, std::ostream& out, const Diagnostics& diag) {
  const SupportBounds bounds = parse_bounds(o);
  const DescentConfig config = descent_config(o);
  const Inputs in = load_inputs(o);
  const FrisoResult r = solve_friso(in.X, in.Y, o.tau, bounds, config, std::nullopt, nullptr,
                                    diag.observer());
  emit_json(o.out_path, out, to_json(r));
}

void cmd_path(const Options& o, std::ostream& out, const Diagnostics& diag) {
  const SupportBounds bounds = parse_bounds(o);
  const DescentConfig config = descent_config(o);
  const std::vector<double> grid = parse_grid(o);
  const std::string format = format_or(o, "csv");
  const Inputs in = load_inputs(o);
  const PathResult path = solution_path(in.X, in.Y, grid, bounds, config, !o.cold, diag.observer());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    diag.event({{"event", "tau"},
                {"tau", grid[k]},
                {"objective", path.objective[k]},
                {"iterations", path.iterations[k]},
                {"converged", path.converged[k] != 0}});
  }
  if (format == "csv") {
    emit(o.out_path, out, [&](std::ostream& os) { write_path_csv(os, path); });
  } else {
    emit_json(o.out_path, out, to_json(path));
  }
}

void cmd_cv(const Options& o, std::ostream& out, const Diagnostics& diag) {
  const SupportBounds bounds = parse_bounds(o);
  DescentConfig config = descent_config(o);
  const std::vector<double> grid = parse_grid(o);
  const std::string format = format_or(o, "json");
  const Inputs in = load_inputs(o);
  const CvReport report = kfold_cv(in.X, in.Y, grid, bounds, o.folds, config, o.seed, o.threads);
  diag.event({{"event", "cv"}, {"tau_star", report.tau_star}});
  if (format == "csv") {
    emit(o.out_path, out, [&](std::ostream& os) { write_cv_csv(os, report); });
  } else {
    emit_json(o.out_path, out, to_json(report));
  }
}

void cmd_stability(const Options& o, std::ostream& out, const Diagnostics& diag) {
  const SupportBounds bounds = parse_bounds(o);
  const DescentConfig config = descent_config(o);
  const std::vector<double> grid = parse_grid(o);
  const std::string format = format_or(o, "json");
  const Inputs in = load_inputs(o);
  const StabilityReport report =
      stability_selection(in.X, in.Y, grid, bounds, o.replicates, o.pi_threshold, o.cutoff, config,
                          o.seed, o.threads);
  Json selected = Json::array();
  for (std::size_t j : report.selected) {
    selected.push_back(j + 1);
  }
  diag.event({{"event", "stability"}, {"selected", selected}});
  if (format == "csv") {
    emit(o.out_path, out, [&](std::ostream& os) { write_stability_csv(os, report); });
  } else {
    emit_json(o.out_path, out, to_json(report));
  }
}

void cmd_bench(const Options& o, std::ostream& out, const Diagnostics& diag) {
  const SupportBounds bounds = parse_bounds(o);
  const DescentConfig config = descent_config(o);
  const SimulatedData sim = generate_zinbinom_qf(o.n, o.m, o.p, o.seed);

  std::map<std::string, std::string> params{{"n", std::to_string(o.n)},
                                            {"m", std::to_string(o.m)},
                                            {"p", std::to_string(o.p)},
                                            {"seed", std::to_string(o.seed)},
                                            {"threads", std::to_string(o.threads)},
                                            {"lower", o.lower},
                                            {"upper", o.upper}};
  std::function<double()> task;
  if (o.task == "fit") {
    task = [&] { return fit_frechet(sim.X, sim.Y, bounds, o.threads).Qhat.values().sum(); };
  } else if (o.task == "select" || o.task == "path") {
    params["epsilon"] = format_double(config.epsilon);
    params["impulse"] = format_double(config.impulse);
    const FrisoProblem problem(sim.X, sim.Y, bounds, config.threads);
    if (o.task == "select") {
      if (!(o.tau > 0.0)) {
        throw InvalidArgument("--tau must be positive for the select task");
      }
      params["tau"] = format_double(o.tau);
      task = [&, problem] { return solve_friso(problem, o.tau, config).objective; };
    } else {
      const std::vector<double> grid = parse_grid(o);
      params["tau_grid"] = o.tau_grid;
      params["warm_start"] = o.cold ? "false" : "true";
      task = [&, problem, grid] {
        const PathResult path = solution_path(problem, grid, config, !o.cold);
        return path.lambda.sum() + static_cast<double>(path.qp_iterations);
      };
    }
  } else {
    throw InvalidArgument("--task must be fit, select or path, got '" + o.task + "'");
  }
  const BenchReport report = measure(o.task, task, o.reps, std::move(params));
  diag.event({{"event", "bench"}, {"task", o.task}, {"median", report.median}});
  emit_json(o.out_path, out, to_json(report));
}

void add_inputs(CLI::App* sub, Options& o) {
  sub->add_option("--x", o.x_path, "Covariate CSV (n rows, p columns, header row)")->required();
  sub->add_option("--y", o.y_path, "Quantile CSV (n rows, m columns, header row)")->required();
}

void add_bounds(CLI::App* sub, Options& o) {
  sub->add_option("--lower", o.lower, "Lower support bound (number or -inf)")->capture_default_str();
  sub->add_option("--upper", o.upper, "Upper support bound (number or inf)")->capture_default_str();
}

void add_descent(CLI::App* sub, Options& o) {
  sub->add_option("--epsilon", o.descent.epsilon, "Stop when the tangent gradient norm is below this")
      ->capture_default_str();
  sub->add_option("--impulse", o.descent.impulse, "Momentum coefficient in [0, 1)")->capture_default_str();
  sub->add_option("--max-iter", o.descent.max_iter, "Iteration limit per tau")->capture_default_str();
  sub->add_option("--step-shrink", o.descent.step_shrink, "Backtracking factor in (0, 1)")
      ->capture_default_str();
  sub->add_option("--max-backtracks", o.descent.max_backtracks, "Backtracking limit per iteration")
      ->capture_default_str();
}

void add_grid(CLI::App* sub, Options& o) {
  sub->add_option("--tau-grid", o.tau_grid, "Increasing tau values: start:stop:step or a,b,c")
      ->capture_default_str();
}

void add_out(CLI::App* sub, Options& o, const std::string& what) {
  sub->add_option("--out", o.out_path, what + " (default: standard output)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app("Frechet regression and variable selection for distributional responses",
               "fastfrechet");
  app.require_subcommand(1);

  std::function<void(const Options&, std::ostream&, const Diagnostics&)> body;
  auto bind = [&](CLI::App* sub, auto fn) {
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sub->add_flag("--verbose", o.verbose, "Write JSON-lines diagnostics to standard error");
    sub->callback([&body, fn] { body = fn; });
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate zero-inflated negative binomial quantile data");
  simulate->add_option("--n", o.n, "Subjects")->capture_default_str();
  simulate->add_option("--m", o.m, "Grid size")->capture_default_str();
  simulate->add_option("--p", o.p, "Covariates (at least 4)")->capture_default_str();
  simulate->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out-x", o.out_x, "Covariate CSV to write")->required();
  simulate->add_option("--out-y", o.out_y, "Quantile CSV to write")->required();
  bind(simulate, cmd_simulate);

  CLI::App* fit = app.add_subcommand("fit", "Fit global Frechet regression under support bounds");
  add_inputs(fit, o);
  add_bounds(fit, o);
  add_out(fit, o, "Fitted quantile CSV");
  fit->add_option("--dump-active-sets", o.active_sets_path,
                  "Write per-row projection active sets as JSON to this file");
  bind(fit, cmd_fit);

  CLI::App* select = app.add_subcommand("select", "Solve the variable-selection problem at one tau");
  add_inputs(select, o);
  add_bounds(select, o);
  select->add_option("--tau", o.tau, "Total weight tau > 0")->required();
  add_descent(select, o);
  add_out(select, o, "Weights JSON");
  bind(select, cmd_select);

  CLI::App* path = app.add_subcommand("path", "Variable-selection solution path over a tau grid");
  add_inputs(path, o);
  add_bounds(path, o);
  add_grid(path, o);
  add_descent(path, o);
  path->add_flag("--cold", o.cold, "Start every tau from the uniform point");
  path->add_option("--format", o.format, "csv (variable,tau,lambda) or json");
  add_out(path, o, "Path table");
  bind(path, cmd_path);

  CLI::App* cv = app.add_subcommand("cv", "K-fold cross-validation over a tau grid");
  add_inputs(cv, o);
  add_bounds(cv, o);
  add_grid(cv, o);
  add_descent(cv, o);
  cv->add_option("--folds", o.folds, "Number of folds K")->capture_default_str();
  cv->add_option("--seed", o.seed, "Fold assignment seed")->capture_default_str();
  cv->add_option("--format", o.format, "json or csv (tau,cv_error)");
  add_out(cv, o, "CV report");
  bind(cv, cmd_cv);

  CLI::App* stability = app.add_subcommand("stability", "Stability selection over half-samples");
  add_inputs(stability, o);
  add_bounds(stability, o);
  add_grid(stability, o);
  add_descent(stability, o);
  stability->add_option("--replicates", o.replicates, "Number of half-samples B")->capture_default_str();
  stability->add_option("--pi", o.pi_threshold, "Selection threshold in (0.5, 1]")->capture_default_str();
  stability->add_option("--cutoff", o.cutoff, "Variable counts as selected when lambda > cutoff * tau / p")
      ->capture_default_str();
  stability->add_option("--seed", o.seed, "Subsampling seed")->capture_default_str();
  stability->add_option("--format", o.format, "json or csv (variable,tau,proportion)");
  add_out(stability, o, "Stability report");
  bind(stability, cmd_stability);

  CLI::App* bench = app.add_subcommand("bench", "Median wall-clock timings on simulated data");
  bench->add_option("--task", o.task, "fit, select or path")->capture_default_str();
  bench->add_option("--reps", o.reps, "Timed repetitions")->capture_default_str();
  bench->add_option("--n", o.n, "Subjects")->capture_default_str();
  bench->add_option("--m", o.m, "Grid size")->capture_default_str();
  bench->add_option("--p", o.p, "Covariates")->capture_default_str();
  bench->add_option("--seed", o.seed, "Simulation seed")->capture_default_str();
  bench->add_option("--tau", o.tau, "Tau for the select task");
  add_grid(bench, o);
  add_bounds(bench, o);
  add_descent(bench, o);
  bench->add_flag("--cold", o.cold, "Path task without warm starts");
  add_out(bench, o, "Bench report JSON");
  bind(bench, cmd_bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e, out, err);
    }
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  const Diagnostics diag(o.verbose, err);
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o, out, diag);
  } catch (const SingularDesign& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InternalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  diag.event({{"event", "done"},
              {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}});
  return kExitOk;
}

}  // namespace fastfrechet::cli
