// Generates synthetic scenario fixtures: a ring-connected fleet, sinusoidal
// inflexible load, per-location carbon profiles with day/night swings and a
// seeded job mix. Used to produce the files under data/.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "vccopt/errors.hpp"
#include "vccopt/io.hpp"
#include "vccopt/scenario.hpp"

using namespace vccopt;
namespace fs = std::filesystem;

namespace {

double u01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

Eigen::MatrixXd synth_carbon(int d, int t, std::mt19937_64& rng) {
  // Per-location base intensity with a time-of-day swing; phases staggered
  // around the ring so low-carbon windows rotate across locations.
  Eigen::MatrixXd rho(d, t);
  for (int dc = 0; dc < d; ++dc) {
    const double base = 80.0 + 520.0 * u01(rng);
    const double swing = (0.3 + 0.5 * u01(rng)) * base;
    const double phase = 2.0 * M_PI * dc / d;
    for (int tt = 0; tt < t; ++tt) {
      const double v = base + swing * std::sin(2.0 * M_PI * tt / t + phase);
      rho(dc, tt) = std::max(10.0, v);
    }
  }
  return rho;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic scenario generator"};
  int dcs = 12;
  int horizon = 5;
  std::string kind = "mixed";
  std::uint64_t seed = 7;
  double budget = 0.55;
  std::string out;
  std::string carbon_csv;
  app.add_option("--dcs", dcs, "Number of data centers")->check(CLI::PositiveNumber);
  app.add_option("--horizon", horizon, "Time steps")->check(CLI::PositiveNumber);
  app.add_option("--kind", kind, "small | large | mixed");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--budget", budget, "Job volume budget as a fraction of capacity");
  app.add_option("--out", out, "Scenario file to write")->required();
  app.add_option("--carbon-csv", carbon_csv,
                 "Also write the carbon grid as a CSV and reference it from the scenario");
  CLI11_PARSE(app, argc, argv);

  JobmixKind jk;
  if (kind == "small") jk = JobmixKind::small;
  else if (kind == "large") jk = JobmixKind::large;
  else if (kind == "mixed") jk = JobmixKind::mixed;
  else {
    std::cerr << "error: unknown kind " << kind << "\n";
    return 2;
  }

  try {
    std::mt19937_64 rng(seed);

    DataCenterFleet fleet;
    fleet.dc_count = dcs;
    for (int v = 1; v <= dcs; ++v) {
      if (dcs == 1) break;
      const int next = (v % dcs) + 1;
      fleet.edges.push_back({v, next, 0.5 + u01(rng)});
      if (dcs == 2) break;  // avoid the duplicate 2-1 edge
    }
    for (int v = 1; v + dcs / 2 <= dcs && dcs >= 4; v += 3) {
      fleet.edges.push_back({v, v + dcs / 2, 1.0 + u01(rng)});
    }
    for (int dc = 0; dc < dcs; ++dc) fleet.physical_capacity.push_back(8.0 + 8.0 * u01(rng));

    std::vector<double> phases;
    for (int dc = 0; dc < dcs; ++dc) phases.push_back(2.0 * M_PI * dc / dcs);
    const Eigen::MatrixXd inflexible =
        synth_inflexible_load(fleet.physical_capacity, horizon, 0.5, 0.3, phases);

    Eigen::MatrixXd effective(dcs, horizon);
    for (int dc = 0; dc < dcs; ++dc) {
      effective.row(dc) =
          Eigen::RowVectorXd::Constant(horizon, fleet.physical_capacity[static_cast<std::size_t>(dc)]) -
          inflexible.row(dc);
    }
    const Eigen::MatrixXd carbon = synth_carbon(dcs, horizon, rng);
    const auto jobs = generate_jobmix(jk, effective, seed, budget);

    const Scenario s = make_scenario(fleet, jobs, horizon, carbon, inflexible);
    save_scenario(s, out);

    if (!carbon_csv.empty()) {
      // Column per location, one row per step.
      std::string text;
      for (int dc = 0; dc < dcs; ++dc) {
        text += (dc ? "," : "") + ("zone-" + std::to_string(dc + 1));
      }
      text += "\n";
      for (int tt = 0; tt < horizon; ++tt) {
        for (int dc = 0; dc < dcs; ++dc) {
          text += (dc ? "," : "") + format_double(carbon(dc, tt));
        }
        text += "\n";
      }
      atomic_write_text(carbon_csv, text);
      // Rewrite the scenario with a CSV reference instead of the inline grid.
      std::ifstream in(out);
      std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      in.close();
      const std::string needle = "\"carbon\": {";
      const auto pos = body.find(needle);
      if (pos != std::string::npos) {
        // Replace the whole inline block with the reference form.
        const auto end = body.find("\n  },", pos);
        std::string cols = "[";
        for (int dc = 0; dc < dcs; ++dc) {
          cols += (dc ? ", " : "") + std::string("\"zone-") + std::to_string(dc + 1) + "\"";
        }
        cols += "]";
        body.replace(pos, end - pos + 4,
                     "\"carbon\": {\n    \"csv\": \"" +
                         fs::path(carbon_csv).filename().string() + "\",\n    \"columns\": " +
                         cols + "\n  }");
        atomic_write_text(out, body);
      }
    }
    std::cout << "wrote " << out << ": " << dcs << " DCs, horizon " << horizon << ", "
              << jobs.size() << " jobs, volume " << format_double(s.total_volume()) << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
