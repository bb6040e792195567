#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vccopt/baselines.hpp"
#include "vccopt/bilevel.hpp"
#include "vccopt/metrics.hpp"
#include "vccopt/scenario.hpp"

namespace vccopt {

enum class Method { bilevel, naive, sequential };

std::string method_name(Method m);

/// One row of a report table. The CSV schema is fixed:
/// method,xi,carbon_total,carbon_per_volume,peak_price,migration_cost,
/// waiting_total,fairness,status,wall_time_s. Failed rows have empty metric
/// cells and status "failed: <reason>".
struct ReportRow {
  std::string method;
  double xi = 0.0;
  std::optional<MetricsBundle> metrics;
  std::string status = "ok";
  double wall_time_s = 0.0;
};

struct SweepResult {
  std::vector<ReportRow> rows;
  bool any_failed = false;
};

/// Runs one solve per xi value (fresh start each) and collects a metrics row
/// per value. xi_values must be nonempty and nondecreasing. A failing row is
/// marked failed and the sweep continues.
SweepResult sweep_xi(const Scenario& scenario, const std::vector<double>& xi_values, Method method,
                     const SolverParams& params);

struct CompareReport {
  std::vector<ReportRow> rows;  // bilevel, naive, sequential (in this order)
  /// bilevel minus baseline, present when both rows succeeded
  std::optional<MetricsBundle> delta_vs_naive;
  std::optional<MetricsBundle> delta_vs_sequential;
  std::optional<double> carbon_savings_per_volume_vs_naive;
  std::optional<double> carbon_savings_per_volume_vs_sequential;
};

/// Runs all three methods on the same scenario. Per-method failures are
/// recorded in the row status; the report is emitted regardless.
CompareReport compare_methods(const Scenario& scenario, const SolverParams& params);

/// Writers. Timing fields are written as 0 unless include_timing is set, so
/// default artifacts are byte-reproducible run to run.
std::string report_rows_to_csv(const std::vector<ReportRow>& rows, bool include_timing = false);
std::string compare_to_json(const CompareReport& report, bool include_timing = false);
std::string run_report_to_json(const ReportRow& row, const VccVector& x,
                               const std::string& final_status, int iterations,
                               bool include_timing = false);
std::string trace_to_csv(const SolverTrace& trace);

/// Parses a solver-params JSON file (any subset of the keys alpha0, decay,
/// step_mode, k_max, tol_x, lambda_tol, p, xi, uniform_weight, epsilon).
SolverParams load_solver_params(const std::filesystem::path& path, SolverParams defaults = {});

}  // namespace vccopt
