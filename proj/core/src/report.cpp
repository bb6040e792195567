#include "vccopt/report.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vccopt/errors.hpp"
#include "vccopt/io.hpp"

namespace vccopt {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::bilevel: return "bilevel";
    case Method::naive: return "naive";
    case Method::sequential: return "sequential";
  }
  return "?";
}

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

ReportRow run_method(const Scenario& s, Method method, const SolverParams& params) {
  ReportRow row;
  row.method = method_name(method);
  row.xi = params.xi;
  const auto t0 = clock_type::now();
  try {
    switch (method) {
      case Method::bilevel: {
        const BilevelResult r = run_bilevel(s, params);
        row.metrics = compute_metrics(s, build_layout(s), r.equilibrium.y_star, params.p);
        break;
      }
      case Method::naive: {
        row.metrics = naive_schedule(s).metrics;
        break;
      }
      case Method::sequential: {
        row.metrics = sequential_optimize(s, params).metrics;
        break;
      }
    }
  } catch (const Error& e) {
    row.status = std::string("failed: ") + e.what();
  }
  row.wall_time_s = seconds_since(t0);
  return row;
}

}  // namespace

SweepResult sweep_xi(const Scenario& s, const std::vector<double>& xi_values, Method method,
                     const SolverParams& params) {
  if (xi_values.empty()) throw ValidationError("sweep: xi list must be nonempty");
  for (std::size_t i = 1; i < xi_values.size(); ++i) {
    if (xi_values[i] < xi_values[i - 1]) {
      throw ValidationError("sweep: xi list must be nondecreasing");
    }
  }
  SweepResult out;
  for (double xi : xi_values) {
    SolverParams p = params;
    p.xi = xi;
    ReportRow row = run_method(s, method, p);
    if (row.status != "ok") out.any_failed = true;
    out.rows.push_back(std::move(row));
  }
  return out;
}

CompareReport compare_methods(const Scenario& s, const SolverParams& params) {
  CompareReport report;
  report.rows.push_back(run_method(s, Method::bilevel, params));
  report.rows.push_back(run_method(s, Method::naive, params));
  report.rows.push_back(run_method(s, Method::sequential, params));

  const auto& bl = report.rows[0].metrics;
  const auto& nv = report.rows[1].metrics;
  const auto& sq = report.rows[2].metrics;
  const double volume = s.total_volume();
  auto diff = [](const MetricsBundle& a, const MetricsBundle& b) {
    MetricsBundle d;
    d.carbon_total = a.carbon_total - b.carbon_total;
    d.carbon_per_volume = a.carbon_per_volume - b.carbon_per_volume;
    d.peak_price = a.peak_price - b.peak_price;
    d.migration_cost = a.migration_cost - b.migration_cost;
    d.waiting_total = a.waiting_total - b.waiting_total;
    d.fairness = a.fairness - b.fairness;
    return d;
  };
  if (bl && nv) {
    report.delta_vs_naive = diff(*bl, *nv);
    if (volume > 0.0) {
      report.carbon_savings_per_volume_vs_naive = (nv->carbon_total - bl->carbon_total) / volume;
    }
  }
  if (bl && sq) {
    report.delta_vs_sequential = diff(*bl, *sq);
    if (volume > 0.0) {
      report.carbon_savings_per_volume_vs_sequential =
          (sq->carbon_total - bl->carbon_total) / volume;
    }
  }
  return report;
}

namespace {

void append_metrics_cells(std::ostringstream& os, const std::optional<MetricsBundle>& m) {
  if (m) {
    os << format_double(m->carbon_total) << ',' << format_double(m->carbon_per_volume) << ','
       << format_double(m->peak_price) << ',' << format_double(m->migration_cost) << ','
       << format_double(m->waiting_total) << ',' << format_double(m->fairness);
  } else {
    os << ",,,,,";
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

json metrics_to_json(const MetricsBundle& m) {
  return json{{"carbon_total", m.carbon_total},
              {"carbon_per_volume", m.carbon_per_volume},
              {"peak_price", m.peak_price},
              {"migration_cost", m.migration_cost},
              {"waiting_total", m.waiting_total},
              {"fairness", m.fairness}};
}

json row_to_json(const ReportRow& row, bool include_timing) {
  json j{{"method", row.method},
         {"xi", row.xi},
         {"status", row.status},
         {"wall_time_s", include_timing ? row.wall_time_s : 0.0}};
  if (row.metrics) j["metrics"] = metrics_to_json(*row.metrics);
  return j;
}

}  // namespace

std::string report_rows_to_csv(const std::vector<ReportRow>& rows, bool include_timing) {
  std::ostringstream os;
  os << "method,xi,carbon_total,carbon_per_volume,peak_price,migration_cost,waiting_total,"
        "fairness,status,wall_time_s\n";
  for (const ReportRow& row : rows) {
    os << row.method << ',' << format_double(row.xi) << ',';
    append_metrics_cells(os, row.metrics);
    os << ',' << csv_escape(row.status) << ','
       << format_double(include_timing ? row.wall_time_s : 0.0) << '\n';
  }
  return os.str();
}

std::string compare_to_json(const CompareReport& report, bool include_timing) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "compare";
  json methods = json::object();
  for (const ReportRow& row : report.rows) methods[row.method] = row_to_json(row, include_timing);
  j["methods"] = std::move(methods);
  if (report.delta_vs_naive) j["delta_bilevel_minus_naive"] = metrics_to_json(*report.delta_vs_naive);
  if (report.delta_vs_sequential) {
    j["delta_bilevel_minus_sequential"] = metrics_to_json(*report.delta_vs_sequential);
  }
  if (report.carbon_savings_per_volume_vs_naive) {
    j["carbon_savings_per_volume_vs_naive"] = *report.carbon_savings_per_volume_vs_naive;
  }
  if (report.carbon_savings_per_volume_vs_sequential) {
    j["carbon_savings_per_volume_vs_sequential"] = *report.carbon_savings_per_volume_vs_sequential;
  }
  return j.dump(2) + "\n";
}

std::string run_report_to_json(const ReportRow& row, const VccVector& x,
                               const std::string& final_status, int iterations,
                               bool include_timing) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "run";
  j["method"] = row.method;
  j["xi"] = row.xi;
  j["status"] = row.status;
  j["final_status"] = final_status;
  j["iterations"] = iterations;
  j["wall_time_s"] = include_timing ? row.wall_time_s : 0.0;
  if (row.metrics) j["metrics"] = metrics_to_json(*row.metrics);
  if (x.values.size() > 0) {
    json grid = json::array();
    for (int d = 1; d <= x.dcs; ++d) {
      json r = json::array();
      for (int t = 1; t <= x.horizon; ++t) r.push_back(x.at(d, t));
      grid.push_back(std::move(r));
    }
    j["vcc"] = std::move(grid);
  }
  return j.dump(2) + "\n";
}

std::string trace_to_csv(const SolverTrace& trace) {
  std::ostringstream os;
  os << "k,phi_e,grad_norm,alpha,step_norm,qp_iterations,wall_time_s,x\n";
  for (const TraceRecord& r : trace.records) {
    os << r.k << ',' << format_double(r.phi_e) << ',' << format_double(r.grad_norm) << ','
       << format_double(r.alpha) << ',' << format_double(r.step_norm) << ',' << r.qp_iterations
       << ',' << format_double(r.wall_time_s) << ',';
    std::string xs;
    for (int i = 0; i < r.x.size(); ++i) {
      if (i) xs += ';';
      xs += format_double(r.x(i));
    }
    os << csv_escape(xs) << '\n';
  }
  return os.str();
}

SolverParams load_solver_params(const std::filesystem::path& path, SolverParams defaults) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open params file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("malformed params JSON (" + path.string() + "): " + e.what());
  }
  SolverParams p = defaults;
  try {
    if (j.contains("alpha0")) p.alpha0 = j.at("alpha0").get<double>();
    if (j.contains("decay")) p.decay = j.at("decay").get<double>();
    if (j.contains("step_mode")) {
      const std::string mode = j.at("step_mode").get<std::string>();
      if (mode == "constant") p.step_mode = StepMode::constant;
      else if (mode == "diminishing") p.step_mode = StepMode::diminishing;
      else throw ParseError("step_mode must be 'constant' or 'diminishing'");
    }
    if (j.contains("k_max")) p.k_max = j.at("k_max").get<int>();
    if (j.contains("tol_x")) p.tol_x = j.at("tol_x").get<double>();
    if (j.contains("lambda_tol")) p.lambda_tol = j.at("lambda_tol").get<double>();
    if (j.contains("p")) p.p = j.at("p").get<int>();
    if (j.contains("xi")) p.xi = j.at("xi").get<double>();
    if (j.contains("uniform_weight")) p.uniform_weight = j.at("uniform_weight").get<double>();
    if (j.contains("epsilon")) p.epsilon = j.at("epsilon").get<double>();
  } catch (const json::exception& e) {
    throw ParseError("malformed params JSON (" + path.string() + "): " + e.what());
  }
  return p;
}

}  // namespace vccopt
