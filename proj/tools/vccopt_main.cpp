// Command line front end: scenario validation, the bilevel solver, the two
// baselines, xi sweeps and method comparisons, emitting plot-ready CSV/JSON.
#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "vccopt/baselines.hpp"
#include "vccopt/bilevel.hpp"
#include "vccopt/errors.hpp"
#include "vccopt/io.hpp"
#include "vccopt/metrics.hpp"
#include "vccopt/report.hpp"
#include "vccopt/scenario.hpp"

namespace fs = std::filesystem;
using namespace vccopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitPartialSweep = 4;

struct CommonArgs {
  std::string scenario;
  std::string out = ".";
  std::string params;
  std::uint64_t seed = 0;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool needs_out) {
  cmd->add_option("--scenario", args->scenario, "Scenario file (JSON)")->required();
  auto* out = cmd->add_option("--out", args->out, "Output directory");
  if (needs_out) out->required();
  cmd->add_option("--params", args->params, "Solver parameter file (JSON)");
  cmd->add_option("--seed", args->seed, "Seed for randomized components (default 0)");
  cmd->add_flag("--timing", args->timing,
                "Record wall times in report files (off keeps outputs byte-reproducible)");
}

SolverParams resolve_params(const CommonArgs& args) {
  SolverParams params;
  if (!args.params.empty()) params = load_solver_params(args.params, params);
  return params;
}

void write_out(const CommonArgs& args, const std::string& name, const std::string& content) {
  fs::create_directories(args.out);
  atomic_write_text(fs::path(args.out) / name, content);
}

double run_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_validate(const CommonArgs& args) {
  const Scenario s = load_scenario(args.scenario);
  std::cout << "scenario OK: " << s.dc_count() << " DCs, horizon " << s.horizon << ", "
            << s.job_count() << " jobs, total volume " << format_double(s.total_volume())
            << ", capacity slack "
            << format_double(s.effective_capacity.sum() - s.total_volume()) << "\n";
  return kExitOk;
}

int cmd_solve(const CommonArgs& args, const std::string& dump_path) {
  const Scenario s = load_scenario(args.scenario);
  const SolverParams params = resolve_params(args);
  const auto t0 = std::chrono::steady_clock::now();
  const BilevelResult result = run_bilevel(s, params);

  ReportRow row;
  row.method = "bilevel";
  row.xi = params.xi;
  row.metrics = compute_metrics(s, build_layout(s), result.equilibrium.y_star, params.p);
  row.wall_time_s = run_seconds(t0);

  write_out(args, "solve_report.json",
            run_report_to_json(row, result.x, result.trace.final_status,
                               static_cast<int>(result.trace.records.size()), args.timing));
  write_out(args, "trace.csv", trace_to_csv(result.trace));
  if (!dump_path.empty()) {
    const GameMatrices m = assemble_game(s, params.epsilon);
    std::ostringstream os;
    dump_game_matrices(m, os, &result.equilibrium);
    atomic_write_text(dump_path, os.str());
  }
  std::cout << "bilevel solve finished: phi_e " << format_double(result.phi_e) << ", "
            << result.trace.records.size() << " iterations (" << result.trace.final_status
            << ")\n";
  return kExitOk;
}

int cmd_baseline(const CommonArgs& args, const std::string& method) {
  const Scenario s = load_scenario(args.scenario);
  const SolverParams params = resolve_params(args);
  const auto t0 = std::chrono::steady_clock::now();
  BaselineResult result;
  if (method == "naive") {
    result = naive_schedule(s);
  } else if (method == "sequential") {
    result = sequential_optimize(s, params);
  } else {
    throw ValidationError("unknown baseline method: " + method);
  }
  ReportRow row;
  row.method = result.label;
  row.xi = params.xi;
  row.metrics = result.metrics;
  row.wall_time_s = run_seconds(t0);
  write_out(args, "baseline_" + method + ".json",
            run_report_to_json(row, result.x_used, "done", 0, args.timing));
  std::cout << "baseline " << method << " finished: carbon_per_volume "
            << format_double(result.metrics.carbon_per_volume) << "\n";
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::vector<double>& xi_values,
              const std::string& method) {
  const Scenario s = load_scenario(args.scenario);
  const SolverParams params = resolve_params(args);
  Method m = Method::bilevel;
  if (method == "sequential") m = Method::sequential;
  else if (method != "bilevel") throw ValidationError("sweep method must be bilevel or sequential");
  const SweepResult sweep = sweep_xi(s, xi_values, m, params);
  write_out(args, "sweep.csv", report_rows_to_csv(sweep.rows, args.timing));
  int failed = 0;
  for (const ReportRow& row : sweep.rows) {
    if (row.status != "ok") ++failed;
  }
  std::cout << "sweep finished: " << sweep.rows.size() << " rows, " << failed << " failed\n";
  return sweep.any_failed ? kExitPartialSweep : kExitOk;
}

int cmd_compare(const CommonArgs& args) {
  const Scenario s = load_scenario(args.scenario);
  const SolverParams params = resolve_params(args);
  const CompareReport report = compare_methods(s, params);
  write_out(args, "compare.json", compare_to_json(report, args.timing));
  write_out(args, "compare.csv", report_rows_to_csv(report.rows, args.timing));
  for (const ReportRow& row : report.rows) {
    std::cout << row.method << ": " << row.status;
    if (row.metrics) {
      std::cout << ", carbon_per_volume " << format_double(row.metrics->carbon_per_volume);
    }
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-design of virtual capacity curves and batch compute allocation"};
  app.require_subcommand(1);

  CommonArgs validate_args;
  CLI::App* validate = app.add_subcommand("validate", "Lint a scenario file");
  add_common(validate, &validate_args, false);

  CommonArgs solve_args;
  std::string dump_path;
  CLI::App* solve = app.add_subcommand("solve", "Run the bilevel co-design solver");
  add_common(solve, &solve_args, true);
  solve->add_option("--dump-matrices", dump_path, "Write the assembled matrices to this file");

  CommonArgs baseline_args;
  std::string baseline_method;
  CLI::App* baseline = app.add_subcommand("baseline", "Run a comparison scheme");
  add_common(baseline, &baseline_args, true);
  baseline->add_option("--method", baseline_method, "naive | sequential")->required();

  CommonArgs sweep_args;
  std::vector<double> xi_values;
  std::string sweep_method = "bilevel";
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep the migration weight xi");
  add_common(sweep, &sweep_args, true);
  sweep->add_option("--xi", xi_values, "Nondecreasing xi values")->required()->delimiter(',');
  sweep->add_option("--method", sweep_method, "bilevel | sequential");

  CommonArgs compare_args;
  CLI::App* compare = app.add_subcommand("compare", "Run bilevel, naive and sequential");
  add_common(compare, &compare_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(validate_args);
    if (solve->parsed()) return cmd_solve(solve_args, dump_path);
    if (baseline->parsed()) return cmd_baseline(baseline_args, baseline_method);
    if (sweep->parsed()) return cmd_sweep(sweep_args, xi_values, sweep_method);
    if (compare->parsed()) return cmd_compare(compare_args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
