#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "vccopt/errors.hpp"
#include "vccopt/scenario.hpp"

using namespace vccopt;
namespace vt = vccopt::testing;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path p = fs::temp_directory_path() / "vccopt_scenario_tests";
  fs::create_directories(p);
  return p;
}

Scenario tiny_scenario() {
  DataCenterFleet fleet;
  fleet.dc_count = 1;
  fleet.physical_capacity = {2.0};
  Eigen::MatrixXd carbon(1, 1);
  carbon << 1.0;
  Eigen::MatrixXd inflexible(1, 1);
  inflexible << 0.0;
  return make_scenario(fleet, {{1, 1, 1.0, 1.0}}, 1, carbon, inflexible);
}

}  // namespace

TEST_CASE("minimal scenario builds with 1x1 grids") {
  const Scenario s = tiny_scenario();
  CHECK(s.dc_count() == 1);
  CHECK(s.horizon == 1);
  CHECK(s.effective_capacity(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("aggregate infeasibility is rejected by name") {
  DataCenterFleet fleet;
  fleet.dc_count = 1;
  fleet.physical_capacity = {2.0};
  Eigen::MatrixXd carbon = Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd inflexible = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_WITH_AS(make_scenario(fleet, {{1, 1, 5.0, 1.0}}, 1, carbon, inflexible),
                       doctest::Contains("aggregate feasibility"), ValidationError);
}

TEST_CASE("scenario save/load round-trips the data model") {
  std::mt19937_64 rng(21);
  const Scenario s = vt::random_scenario(rng);
  const fs::path path = temp_dir() / "roundtrip.json";
  save_scenario(s, path);
  const Scenario r = load_scenario(path);

  CHECK(r.dc_count() == s.dc_count());
  CHECK(r.horizon == s.horizon);
  REQUIRE(r.jobs.size() == s.jobs.size());
  for (std::size_t i = 0; i < s.jobs.size(); ++i) {
    CHECK(r.jobs[i].id == s.jobs[i].id);
    CHECK(r.jobs[i].home_dc == s.jobs[i].home_dc);
    CHECK(r.jobs[i].volume == s.jobs[i].volume);
    CHECK(r.jobs[i].priority == s.jobs[i].priority);
  }
  CHECK((r.carbon_intensity - s.carbon_intensity).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.inflexible_load - s.inflexible_load).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.effective_capacity - s.effective_capacity).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(r.fleet.edges.size() == s.fleet.edges.size());
  for (std::size_t e = 0; e < s.fleet.edges.size(); ++e) {
    CHECK(r.fleet.edges[e].price == s.fleet.edges[e].price);
  }
}

TEST_CASE("malformed scenario file raises ParseError") {
  const fs::path path = temp_dir() / "broken.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_scenario(path), ParseError);

  std::ofstream(path) << "{\"schema_version\": 2}";
  CHECK_THROWS_AS(load_scenario(path), ParseError);
}

TEST_CASE("carbon CSV ingestion transposes rows to the [d][t] grid") {
  const fs::path path = temp_dir() / "carbon.csv";
  std::ofstream(path) << "zone-a,zone-b\n100.0,200.0\n50.0,250.0\n";
  const Eigen::MatrixXd g = ingest_carbon_csv(path, {"zone-a", "zone-b"}, 2);
  REQUIRE(g.rows() == 2);
  REQUIRE(g.cols() == 2);
  CHECK(g(0, 0) == 100.0);  // DC 1, t 1
  CHECK(g(0, 1) == 50.0);   // DC 1, t 2
  CHECK(g(1, 0) == 200.0);
  CHECK(g(1, 1) == 250.0);
}

TEST_CASE("carbon CSV errors: negative value, missing column, too few rows") {
  const fs::path path = temp_dir() / "carbon_bad.csv";
  std::ofstream(path) << "a,b\n1.0,-1.0\n";
  CHECK_THROWS_WITH_AS(ingest_carbon_csv(path, {"a", "b"}, 1),
                       doctest::Contains("NegativeIntensity"), ValidationError);
  CHECK_THROWS_WITH_AS(ingest_carbon_csv(path, {"a", "c"}, 1), doctest::Contains("MissingColumn"),
                       ValidationError);
  std::ofstream(path) << "a\n1.0\n2.0\n";
  CHECK_THROWS_WITH_AS(ingest_carbon_csv(path, {"a"}, 5), doctest::Contains("TooFewRows"),
                       ValidationError);
}

TEST_CASE("carbon CSV single column passthrough") {
  const fs::path path = temp_dir() / "carbon_single.csv";
  std::ofstream(path) << "only\n1\n2\n3\n4\n5\n";
  const Eigen::MatrixXd g = ingest_carbon_csv(path, {"only"}, 5);
  REQUIRE(g.rows() == 1);
  REQUIRE(g.cols() == 5);
  for (int t = 0; t < 5; ++t) CHECK(g(0, t) == doctest::Approx(t + 1.0));
}

TEST_CASE("carbon CSV ignores rows beyond the horizon") {
  const fs::path path = temp_dir() / "carbon_extra.csv";
  std::ofstream(path) << "a\n1\n2\n3\n";
  const Eigen::MatrixXd g = ingest_carbon_csv(path, {"a"}, 2);
  REQUIRE(g.cols() == 2);
  CHECK(g(0, 1) == 2.0);
}

TEST_CASE("synthetic inflexible load follows the sinusoid") {
  SUBCASE("zero amplitude is constant half capacity") {
    const Eigen::MatrixXd load = synth_inflexible_load({10.0}, 4, 0.5, 0.0, {0.0});
    for (int t = 0; t < 4; ++t) CHECK(load(0, t) == doctest::Approx(5.0));
  }
  SUBCASE("extremal phase zeroes the first step") {
    const Eigen::MatrixXd load = synth_inflexible_load({10.0}, 4, 0.5, 0.5, {-M_PI / 2});
    CHECK(load(0, 0) == doctest::Approx(0.0));
  }
  SUBCASE("anti-phase DCs and pointwise formula") {
    const double base = 0.3, amp = 0.2;
    const Eigen::MatrixXd load = synth_inflexible_load({1.0, 1.0}, 4, base, amp, {0.0, M_PI});
    for (int t = 0; t < 4; ++t) {
      const double expect0 = base + amp * std::sin(2 * M_PI * t / 4.0);
      const double expect1 = base + amp * std::sin(2 * M_PI * t / 4.0 + M_PI);
      CHECK(load(0, t) == doctest::Approx(expect0));
      CHECK(load(1, t) == doctest::Approx(expect1));
    }
  }
  SUBCASE("amplitude out of range is rejected") {
    CHECK_THROWS_WITH_AS(synth_inflexible_load({1.0}, 2, 0.5, 0.6, {0.0}),
                         doctest::Contains("AmplitudeOutOfRange"), ValidationError);
  }
}

TEST_CASE("jobmix classes are respected") {
  Eigen::MatrixXd cap(1, 2);
  cap << 10.0, 10.0;
  SUBCASE("small jobs fit in one step and within budget") {
    const auto jobs = generate_jobmix(JobmixKind::small, cap, 3, 0.5);
    double total = 0.0;
    for (const ComputeJob& j : jobs) {
      CHECK(j.volume <= 10.0);
      total += j.volume;
    }
    CHECK(total <= 0.5 * cap.sum() + 1e-12);
  }
  SUBCASE("large jobs exceed every single step at home") {
    const auto jobs = generate_jobmix(JobmixKind::large, cap, 3, 1.0);
    REQUIRE(!jobs.empty());
    for (const ComputeJob& j : jobs) CHECK(j.volume > 10.0);
  }
  SUBCASE("identical seeds give identical mixes") {
    const auto a = generate_jobmix(JobmixKind::mixed, cap, 42, 0.8);
    const auto b = generate_jobmix(JobmixKind::mixed, cap, 42, 0.8);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].volume == b[i].volume);
      CHECK(a[i].priority == b[i].priority);
      CHECK(a[i].home_dc == b[i].home_dc);
    }
  }
  SUBCASE("impossible budget raises BudgetInfeasible") {
    Eigen::MatrixXd one_step(1, 1);
    one_step << 10.0;
    CHECK_THROWS_WITH_AS(generate_jobmix(JobmixKind::large, one_step, 1, 0.9),
                         doctest::Contains("BudgetInfeasible"), InfeasibleError);
  }
}

TEST_CASE("jobmix output keeps scenarios aggregate-feasible") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 1 + vt::pick(rng, 3);
    const int t = 2 + vt::pick(rng, 3);
    DataCenterFleet fleet;
    fleet.dc_count = d;
    for (int v = 2; v <= d; ++v) fleet.edges.push_back({v - 1, v, 1.0});
    for (int i = 0; i < d; ++i) fleet.physical_capacity.push_back(vt::uniform(rng, 4.0, 10.0));
    const Eigen::MatrixXd inflexible = Eigen::MatrixXd::Zero(d, t);
    Eigen::MatrixXd cap(d, t);
    for (int i = 0; i < d; ++i) {
      cap.row(i).setConstant(fleet.physical_capacity[static_cast<std::size_t>(i)]);
    }
    const auto kind = static_cast<JobmixKind>(trial % 3);
    const auto jobs = generate_jobmix(kind, cap, 100 + trial, 0.7);
    const Eigen::MatrixXd carbon = Eigen::MatrixXd::Ones(d, t);
    CHECK_NOTHROW(make_scenario(fleet, jobs, t, carbon, inflexible));
  }
}
