#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vccopt/fleet.hpp"

namespace vccopt {

/// One batch compute job: a volume to execute, a priority weight and the DC
/// where its data initially lives.
struct ComputeJob {
  int id = 0;
  DcId home_dc = 0;
  double volume = 0.0;    // > 0
  double priority = 1.0;  // > 0
};

/// A complete problem instance. Grids are D x T, indexed (dc-1, t-1).
/// effective_capacity is derived: physical capacity minus inflexible load.
/// paths_from[s-1][d-1] is the frozen minimum-price route s -> d; it is
/// computed once at construction and never re-routed.
struct Scenario {
  DataCenterFleet fleet;
  std::vector<ComputeJob> jobs;
  int horizon = 0;  // T >= 1
  Eigen::MatrixXd carbon_intensity;   // gCO2 per unit compute, D x T
  Eigen::MatrixXd inflexible_load;    // D x T
  Eigen::MatrixXd effective_capacity; // D x T, x_max
  std::vector<std::vector<MigrationPath>> paths_from;

  int dc_count() const { return fleet.dc_count; }
  int job_count() const { return static_cast<int>(jobs.size()); }
  double total_volume() const;
  /// Base migration price of moving job i's data from its home to `target`.
  double migration_price(int job_index, DcId target) const;
};

/// Builds a Scenario from parts: derives effective capacities, precomputes
/// all migration paths and checks every invariant (throws ValidationError
/// with the violated invariant named in the message).
Scenario make_scenario(DataCenterFleet fleet, std::vector<ComputeJob> jobs, int horizon,
                       Eigen::MatrixXd carbon_intensity, Eigen::MatrixXd inflexible_load);

/// Re-runs all scenario invariants; throws ValidationError on the first
/// violation.
void validate_scenario(const Scenario& scenario);

/// Reads a scenario file (UTF-8 JSON, schema_version 1). Carbon intensity
/// may be given inline or as a CSV reference resolved relative to the
/// scenario file. Throws ParseError on malformed input and ValidationError
/// when an invariant is broken.
Scenario load_scenario(const std::filesystem::path& path);

/// Writes the scenario as schema_version-1 JSON (carbon always inline).
/// load_scenario(save_scenario(s)) reproduces the same data model.
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Parses a carbon-intensity CSV: a header row of location names, then one
/// row per time step, comma separated, decimal points. dc_columns[d-1]
/// names the column supplying DC d. Rows beyond T are ignored. Returns a
/// D x T grid. Errors: MissingColumn, NegativeIntensity, TooFewRows.
Eigen::MatrixXd ingest_carbon_csv(const std::filesystem::path& path,
                                  const std::vector<std::string>& dc_columns, int horizon);

/// Sinusoidal inflexible-load generator:
///   load[d][t] = capacity[d] * (base + amplitude * sin(2*pi*t/T + phase[d]))
/// with t = 0..T-1, clamped to [0, capacity[d]]. Requires
/// 0 <= base - amplitude and base + amplitude <= 1 (AmplitudeOutOfRange).
Eigen::MatrixXd synth_inflexible_load(const std::vector<double>& physical_capacity, int horizon,
                                      double base, double amplitude,
                                      const std::vector<double>& phase);

enum class JobmixKind { large, small, mixed };

/// Draws a deterministic job mix against the given effective-capacity grid.
/// "large" jobs exceed every single-step capacity at their home DC, "small"
/// jobs fit within one step, "mixed" flips a fair coin per job. Priorities
/// come uniformly from priority_grid. Total volume stays within
/// budget * sum(effective_capacity), accounted per home DC so any DC can
/// absorb its own jobs over the horizon. Identical seeds give identical
/// job lists.
std::vector<ComputeJob> generate_jobmix(JobmixKind kind, const Eigen::MatrixXd& effective_capacity,
                                        std::uint64_t seed, double budget,
                                        const std::vector<double>& priority_grid = {1, 2, 4, 8});

}  // namespace vccopt
