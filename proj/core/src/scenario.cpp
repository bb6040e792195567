#include "vccopt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vccopt/errors.hpp"
#include "vccopt/io.hpp"

namespace vccopt {

using nlohmann::json;

double Scenario::total_volume() const {
  double v = 0.0;
  for (const ComputeJob& j : jobs) v += j.volume;
  return v;
}

double Scenario::migration_price(int job_index, DcId target) const {
  const ComputeJob& j = jobs.at(static_cast<std::size_t>(job_index));
  return paths_from[static_cast<std::size_t>(j.home_dc - 1)][static_cast<std::size_t>(target - 1)]
      .base_price;
}

void validate_scenario(const Scenario& s) {
  if (auto issue = validate_fleet(s.fleet)) {
    throw ValidationError("fleet invariant: " + issue->code + ": " + issue->message);
  }
  const int d = s.fleet.dc_count;
  const int t = s.horizon;
  if (t < 1) throw ValidationError("horizon must be a positive integer");
  if (static_cast<int>(s.fleet.physical_capacity.size()) != d) {
    throw ValidationError("physical capacity must have exactly D entries");
  }
  for (double c : s.fleet.physical_capacity) {
    if (!(c >= 0.0)) throw ValidationError("physical capacity must be nonnegative");
  }
  auto check_grid = [&](const Eigen::MatrixXd& g, const char* name) {
    if (g.rows() != d || g.cols() != t) {
      throw ValidationError(std::string(name) + " grid must have exactly DxT entries");
    }
    if (!g.allFinite()) throw ValidationError(std::string(name) + " grid must be finite");
    if ((g.array() < 0.0).any()) {
      throw ValidationError(std::string(name) + " grid must be nonnegative");
    }
  };
  check_grid(s.carbon_intensity, "carbon");
  check_grid(s.inflexible_load, "inflexible");
  if (s.effective_capacity.rows() != d || s.effective_capacity.cols() != t) {
    throw ValidationError("effective capacity grid must have exactly DxT entries");
  }
  if ((s.effective_capacity.array() < 0.0).any()) {
    throw ValidationError("effective capacity nonnegative: inflexible load exceeds physical capacity");
  }
  std::set<int> ids;
  for (const ComputeJob& j : s.jobs) {
    if (!(j.volume > 0.0)) throw ValidationError("job volume must be positive (job " + std::to_string(j.id) + ")");
    if (!(j.priority > 0.0)) throw ValidationError("job priority must be positive (job " + std::to_string(j.id) + ")");
    if (j.home_dc < 1 || j.home_dc > d) throw ValidationError("job home DC out of range (job " + std::to_string(j.id) + ")");
    if (!ids.insert(j.id).second) throw ValidationError("job ids must be unique (job " + std::to_string(j.id) + ")");
  }
  double total_v = 0.0;
  for (const ComputeJob& j : s.jobs) total_v += j.volume;
  if (s.effective_capacity.sum() < total_v) {
    throw ValidationError("aggregate feasibility: total effective capacity " +
                          std::to_string(s.effective_capacity.sum()) +
                          " is below total job volume " + std::to_string(total_v));
  }
}

Scenario make_scenario(DataCenterFleet fleet, std::vector<ComputeJob> jobs, int horizon,
                       Eigen::MatrixXd carbon_intensity, Eigen::MatrixXd inflexible_load) {
  Scenario s;
  s.fleet = std::move(fleet);
  s.jobs = std::move(jobs);
  s.horizon = horizon;
  s.carbon_intensity = std::move(carbon_intensity);
  s.inflexible_load = std::move(inflexible_load);
  const int d = s.fleet.dc_count;
  if (static_cast<int>(s.fleet.physical_capacity.size()) == d && s.inflexible_load.rows() == d &&
      s.inflexible_load.cols() == horizon) {
    s.effective_capacity.resize(d, horizon);
    for (int i = 0; i < d; ++i) {
      s.effective_capacity.row(i) =
          Eigen::RowVectorXd::Constant(horizon, s.fleet.physical_capacity[static_cast<std::size_t>(i)]) -
          s.inflexible_load.row(i);
    }
  }
  validate_scenario(s);
  s.paths_from.resize(static_cast<std::size_t>(d));
  for (int src = 1; src <= d; ++src) {
    s.paths_from[static_cast<std::size_t>(src - 1)] = shortest_paths_from(s.fleet, src);
  }
  return s;
}

namespace {

json require_field(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "' in " + where);
  }
  return j.at(key);
}

Eigen::MatrixXd grid_from_json(const json& j, int d, int t, const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) {
    throw ParseError(std::string(name) + " must be an array of D rows");
  }
  Eigen::MatrixXd g(d, t);
  for (int i = 0; i < d; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<int>(row.size()) != t) {
      throw ParseError(std::string(name) + " row " + std::to_string(i + 1) +
                       " must have exactly T entries");
    }
    for (int k = 0; k < t; ++k) {
      const json& cell = row.at(static_cast<std::size_t>(k));
      if (!cell.is_number()) throw ParseError(std::string(name) + " entries must be numbers");
      g(i, k) = cell.get<double>();
    }
  }
  return g;
}

json grid_to_json(const Eigen::MatrixXd& g) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < g.cols(); ++k) row.push_back(g(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("malformed scenario JSON (" + path.string() + "): " + e.what());
  }
  try {
    const int version = require_field(j, "schema_version", "scenario").get<int>();
    if (version != 1) {
      throw ParseError("unsupported scenario schema_version " + std::to_string(version));
    }
    const json jf = require_field(j, "fleet", "scenario");
    DataCenterFleet fleet;
    fleet.dc_count = require_field(jf, "dc_count", "fleet").get<int>();
    for (const json& je : require_field(jf, "edges", "fleet")) {
      FiberEdge e;
      e.a = require_field(je, "a", "edge").get<int>();
      e.b = require_field(je, "b", "edge").get<int>();
      e.price = require_field(je, "price", "edge").get<double>();
      fleet.edges.push_back(e);
    }
    fleet.physical_capacity =
        require_field(jf, "physical_capacity", "fleet").get<std::vector<double>>();

    const int horizon = require_field(j, "horizon", "scenario").get<int>();
    if (horizon < 1) throw ParseError("horizon must be >= 1");

    std::vector<ComputeJob> jobs;
    for (const json& jj : require_field(j, "jobs", "scenario")) {
      ComputeJob job;
      job.id = require_field(jj, "id", "job").get<int>();
      job.home_dc = require_field(jj, "home_dc", "job").get<int>();
      job.volume = require_field(jj, "volume", "job").get<double>();
      job.priority = require_field(jj, "priority", "job").get<double>();
      jobs.push_back(job);
    }

    const json jc = require_field(j, "carbon", "scenario");
    Eigen::MatrixXd carbon;
    if (jc.contains("inline")) {
      carbon = grid_from_json(jc.at("inline"), fleet.dc_count, horizon, "carbon.inline");
    } else if (jc.contains("csv")) {
      const auto csv_path = path.parent_path() / jc.at("csv").get<std::string>();
      const auto columns = require_field(jc, "columns", "carbon").get<std::vector<std::string>>();
      if (static_cast<int>(columns.size()) != fleet.dc_count) {
        throw ParseError("carbon.columns must list exactly D column names");
      }
      carbon = ingest_carbon_csv(csv_path, columns, horizon);
    } else {
      throw ParseError("carbon section needs either 'inline' or 'csv'");
    }

    Eigen::MatrixXd inflexible =
        grid_from_json(require_field(j, "inflexible", "scenario"), fleet.dc_count, horizon, "inflexible");

    return make_scenario(std::move(fleet), std::move(jobs), horizon, std::move(carbon),
                         std::move(inflexible));
  } catch (const json::exception& e) {
    throw ParseError("malformed scenario JSON (" + path.string() + "): " + e.what());
  }
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  json j;
  j["schema_version"] = 1;
  json jf;
  jf["dc_count"] = s.fleet.dc_count;
  json edges = json::array();
  for (const FiberEdge& e : s.fleet.edges) {
    edges.push_back({{"a", e.a}, {"b", e.b}, {"price", e.price}});
  }
  jf["edges"] = std::move(edges);
  jf["physical_capacity"] = s.fleet.physical_capacity;
  j["fleet"] = std::move(jf);
  j["horizon"] = s.horizon;
  json jobs = json::array();
  for (const ComputeJob& job : s.jobs) {
    jobs.push_back({{"id", job.id},
                    {"home_dc", job.home_dc},
                    {"volume", job.volume},
                    {"priority", job.priority}});
  }
  j["jobs"] = std::move(jobs);
  j["carbon"] = {{"inline", grid_to_json(s.carbon_intensity)}};
  j["inflexible"] = grid_to_json(s.inflexible_load);
  atomic_write_text(path, j.dump(2) + "\n");
}

Eigen::MatrixXd ingest_carbon_csv(const std::filesystem::path& path,
                                  const std::vector<std::string>& dc_columns, int horizon) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open carbon CSV: " + path.string());

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      // Trim surrounding whitespace and stray carriage returns.
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
  };

  std::string line;
  if (!std::getline(in, line)) throw ParseError("carbon CSV is empty: " + path.string());
  const std::vector<std::string> header = split(line);

  std::vector<int> column_of_dc;
  for (const std::string& want : dc_columns) {
    auto it = std::find(header.begin(), header.end(), want);
    if (it == header.end()) {
      throw ValidationError("MissingColumn: carbon CSV has no column '" + want + "'");
    }
    column_of_dc.push_back(static_cast<int>(it - header.begin()));
  }

  const int d = static_cast<int>(dc_columns.size());
  Eigen::MatrixXd grid(d, horizon);
  int row = 0;
  while (row < horizon && std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    for (int i = 0; i < d; ++i) {
      const int c = column_of_dc[static_cast<std::size_t>(i)];
      if (c >= static_cast<int>(cells.size())) {
        throw ParseError("carbon CSV row " + std::to_string(row + 2) + " is too short");
      }
      const std::string& cell = cells[static_cast<std::size_t>(c)];
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw ParseError("carbon CSV cell '" + cell + "' is not a number (row " +
                         std::to_string(row + 2) + ")");
      }
      if (v < 0.0) {
        throw ValidationError("NegativeIntensity: carbon CSV value " + cell + " at row " +
                              std::to_string(row + 2));
      }
      grid(i, row) = v;
    }
    ++row;
  }
  if (row < horizon) {
    throw ValidationError("TooFewRows: carbon CSV has " + std::to_string(row) +
                          " data rows, need " + std::to_string(horizon));
  }
  return grid;
}

Eigen::MatrixXd synth_inflexible_load(const std::vector<double>& physical_capacity, int horizon,
                                      double base, double amplitude,
                                      const std::vector<double>& phase) {
  if (!(base - std::abs(amplitude) >= 0.0) || !(base + std::abs(amplitude) <= 1.0)) {
    throw ValidationError("AmplitudeOutOfRange: need 0 <= base +- amplitude <= 1, got base=" +
                          std::to_string(base) + " amplitude=" + std::to_string(amplitude));
  }
  const int d = static_cast<int>(physical_capacity.size());
  if (static_cast<int>(phase.size()) != d) {
    throw ValidationError("phase must have one entry per DC");
  }
  Eigen::MatrixXd load(d, horizon);
  for (int i = 0; i < d; ++i) {
    const double cap = physical_capacity[static_cast<std::size_t>(i)];
    for (int t = 0; t < horizon; ++t) {
      const double s = std::sin(2.0 * M_PI * t / horizon + phase[static_cast<std::size_t>(i)]);
      load(i, t) = std::clamp(cap * (base + amplitude * s), 0.0, cap);
    }
  }
  return load;
}

namespace {

double uniform01(std::mt19937_64& g) {
  // 53 random bits; avoids std::uniform_real_distribution so the stream is
  // identical across standard library implementations.
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

std::size_t pick_index(std::mt19937_64& g, std::size_t n) { return static_cast<std::size_t>(g() % n); }

}  // namespace

std::vector<ComputeJob> generate_jobmix(JobmixKind kind, const Eigen::MatrixXd& effective_capacity,
                                        std::uint64_t seed, double budget,
                                        const std::vector<double>& priority_grid) {
  if (!(budget > 0.0 && budget <= 1.0)) {
    throw ValidationError("jobmix budget must be in (0, 1]");
  }
  if (priority_grid.empty()) throw ValidationError("priority grid must be nonempty");
  const int d = static_cast<int>(effective_capacity.rows());

  std::vector<double> remaining(static_cast<std::size_t>(d));
  std::vector<double> step_max(static_cast<std::size_t>(d));
  std::vector<double> step_min(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    remaining[static_cast<std::size_t>(i)] = budget * effective_capacity.row(i).sum();
    step_max[static_cast<std::size_t>(i)] = effective_capacity.row(i).maxCoeff();
    step_min[static_cast<std::size_t>(i)] = effective_capacity.row(i).minCoeff();
  }

  std::mt19937_64 rng(seed);
  std::vector<ComputeJob> jobs;
  const int max_jobs = 12 * d;

  auto small_range = [&](int dc) -> std::pair<double, double> {
    const double ref = step_min[static_cast<std::size_t>(dc)] > 0.0
                           ? step_min[static_cast<std::size_t>(dc)]
                           : 0.5 * step_max[static_cast<std::size_t>(dc)];
    const double lo = 0.15 * ref;
    const double hi = std::min(0.9 * ref, remaining[static_cast<std::size_t>(dc)]);
    return {lo, hi};
  };
  auto large_range = [&](int dc) -> std::pair<double, double> {
    const double ref = step_max[static_cast<std::size_t>(dc)];
    const double lo = 1.05 * ref;
    const double hi = std::min(1.9 * ref, remaining[static_cast<std::size_t>(dc)]);
    return {lo, hi};
  };

  while (static_cast<int>(jobs.size()) < max_jobs) {
    // Decide the class first so "mixed" draws stay reproducible even as DCs
    // fill up.
    bool want_large = false;
    switch (kind) {
      case JobmixKind::large: want_large = true; break;
      case JobmixKind::small: want_large = false; break;
      case JobmixKind::mixed: want_large = (rng() & 1u) != 0; break;
    }
    std::vector<int> eligible;
    for (int dc = 0; dc < d; ++dc) {
      const auto [lo, hi] = want_large ? large_range(dc) : small_range(dc);
      if (lo > 0.0 && lo <= hi) eligible.push_back(dc);
    }
    if (eligible.empty()) {
      if (kind == JobmixKind::mixed) {
        // The drawn class no longer fits anywhere; try the other class once
        // before giving up.
        bool other_fits = false;
        for (int dc = 0; dc < d; ++dc) {
          const auto [lo, hi] = want_large ? small_range(dc) : large_range(dc);
          if (lo > 0.0 && lo <= hi) {
            other_fits = true;
            break;
          }
        }
        if (!other_fits) break;
        continue;
      }
      break;
    }
    const int dc = eligible[pick_index(rng, eligible.size())];
    const auto [lo, hi] = want_large ? large_range(dc) : small_range(dc);
    const double v = lo + (hi - lo) * uniform01(rng);
    ComputeJob job;
    job.id = static_cast<int>(jobs.size()) + 1;
    job.home_dc = dc + 1;
    job.volume = v;
    job.priority = priority_grid[pick_index(rng, priority_grid.size())];
    jobs.push_back(job);
    remaining[static_cast<std::size_t>(dc)] -= v;
  }

  if (jobs.empty()) {
    throw InfeasibleError("BudgetInfeasible: no job of the requested class fits within budget " +
                          std::to_string(budget));
  }
  return jobs;
}

}  // namespace vccopt
