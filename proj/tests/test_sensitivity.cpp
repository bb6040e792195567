#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vccopt/errors.hpp"
#include "vccopt/sensitivity.hpp"

using namespace vccopt;
namespace vt = vccopt::testing;

namespace {

Scenario single_dc(double volume, int horizon, double capacity) {
  DataCenterFleet fleet;
  fleet.dc_count = 1;
  fleet.physical_capacity = {capacity};
  return make_scenario(fleet, {{1, 1, volume, 1.0}}, horizon, Eigen::MatrixXd::Ones(1, horizon),
                       Eigen::MatrixXd::Zero(1, horizon));
}

// Strict complementarity screen: every active multiplier clearly positive,
// every inactive slack clearly positive.
bool nondegenerate(const GameMatrices& m, const EquilibriumResult& eq, const Eigen::VectorXd& x) {
  const Eigen::VectorXd slack = m.h_tilde + m.H * x - m.G_tilde * eq.y_tilde_star;
  std::vector<char> active(static_cast<std::size_t>(eq.lambda.size()), 0);
  for (int r : eq.active_set) active[static_cast<std::size_t>(r)] = 1;
  for (int r = 0; r < eq.lambda.size(); ++r) {
    if (active[static_cast<std::size_t>(r)]) {
      if (eq.lambda(r) <= 1e-4) return false;
    } else if (slack(r) <= 1e-4) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("no active coupling rows gives a zero jacobian") {
  const Scenario s = single_dc(1.0, 2, 4.0);
  const GameMatrices m = assemble_game(s);
  Eigen::VectorXd x(2);
  x << 3.0, 3.0;  // far from binding
  const EquilibriumResult eq = solve_game(m, x);
  const SensitivityResult sr = compute_sensitivity(m, eq, x);
  CHECK(sr.jacobian_full.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("binding capacity row: unit gain at t1, unit loss at t2") {
  const Scenario s = single_dc(1.0, 2, 2.0);
  const GameMatrices m = assemble_game(s);
  Eigen::VectorXd x(2);
  x << 0.4, 1.0;
  const EquilibriumResult eq = solve_game(m, x);
  const SensitivityResult sr = compute_sensitivity(m, eq, x);
  const DecisionLayout& l = m.layout;
  CHECK(sr.jacobian_full(l.y_index(0, 1, 1), l.x_index(1, 1)) == doctest::Approx(1.0));
  CHECK(sr.jacobian_full(l.y_index(0, 1, 2), l.x_index(1, 1)) == doctest::Approx(-1.0));
  // x[1][2] appears in no active row: its column is exactly zero.
  CHECK(sr.jacobian_full.col(l.x_index(1, 2)).cwiseAbs().maxCoeff() == 0.0);

  // Finite-difference cross-check, h = 1e-5.
  const Eigen::MatrixXd fd = finite_difference_jacobian(m, x, 1e-5);
  CHECK((fd - sr.jacobian_full).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("sensitivity requires a solved equilibrium") {
  const Scenario s = single_dc(1.0, 2, 2.0);
  const GameMatrices m = assemble_game(s);
  EquilibriumResult eq;  // unsolved
  Eigen::VectorXd x(2);
  x << 1.0, 1.0;
  CHECK_THROWS_AS(compute_sensitivity(m, eq, x), NotSolvedError);
}

TEST_CASE("random nondegenerate instances match finite differences") {
  std::mt19937_64 rng(4242);
  vt::RandomScenarioSpec spec;
  spec.min_jobs = 2;
  spec.max_jobs = 3;
  spec.max_dcs = 2;  // every DC homes a job, keeping probe points feasible
  int tested = 0;
  for (int trial = 0; trial < 150 && tested < 12; ++trial) {
    const Scenario s = vt::random_scenario(rng, spec);
    const GameMatrices m = assemble_game(s);
    Eigen::VectorXd x;
    EquilibriumResult eq;
    try {
      x = vt::random_interior_x(s, rng, 0.05);
      eq = solve_game(m, x);
    } catch (const InfeasibleError&) {
      continue;
    }
    if (!nondegenerate(m, eq, x)) continue;
    const SensitivityResult sr = compute_sensitivity(m, eq, x);
    if (sr.degenerate) continue;
    Eigen::MatrixXd fd;
    try {
      fd = finite_difference_jacobian(m, x, 1e-5);
    } catch (const InfeasibleError&) {
      continue;
    }
    const double denom = 1.0 + sr.jacobian_full.cwiseAbs().maxCoeff();
    CHECK((fd - sr.jacobian_full).cwiseAbs().maxCoeff() / denom <= 1e-4);

    // Directional feasibility along every active row, per x direction.
    for (int k : sr.active_rows) {
      const Eigen::RowVectorXd lhs = m.G_tilde.row(k) * sr.jacobian_reduced;
      const Eigen::RowVectorXd rhs = m.H.row(k);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
    // Equality preservation for every column.
    CHECK((m.A * sr.jacobian_full).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + m.A.cwiseAbs().maxCoeff()));
    ++tested;
  }
  CHECK(tested >= 6);
}

TEST_CASE("finite differences are self-consistent across step sizes") {
  const Scenario s = single_dc(1.0, 2, 2.0);
  const GameMatrices m = assemble_game(s);
  Eigen::VectorXd x(2);
  x << 0.4, 1.0;
  const Eigen::MatrixXd fd1 = finite_difference_jacobian(m, x, 1e-5);
  const Eigen::MatrixXd fd2 = finite_difference_jacobian(m, x, 1e-6);
  CHECK((fd1 - fd2).cwiseAbs().maxCoeff() <= 10 * 1e-5);
}

TEST_CASE("zero-jacobian case has O(h^2) finite differences") {
  const Scenario s = single_dc(1.0, 2, 4.0);
  const GameMatrices m = assemble_game(s);
  Eigen::VectorXd x(2);
  x << 3.0, 3.0;
  const double h = 1e-4;
  const Eigen::MatrixXd fd = finite_difference_jacobian(m, x, h);
  CHECK(fd.cwiseAbs().maxCoeff() <= 10 * h * h + 1e-9);
}
