// Test-only oracles, independent of the solver paths they cross-check.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "vccopt/game.hpp"
#include "vccopt/scenario.hpp"

namespace vccopt::testing {

/// Uniform double in [0, 1) from raw generator bits, identical on every
/// platform.
double u01(std::mt19937_64& rng);
/// Uniform in [lo, hi).
double uniform(std::mt19937_64& rng, double lo, double hi);
/// Uniform integer in [0, n).
int pick(std::mt19937_64& rng, int n);

/// Reference QP solution by exhaustive active-set enumeration:
///   min 0.5||u - target||^2  s.t. C u <= d (rows >= n_eq), C u = d (rows < n_eq).
/// Tries every subset of inequality rows as the active set and returns the
/// unique KKT point. Only for small row counts (<= ~16 inequalities).
struct OracleQpResult {
  bool feasible = false;
  Eigen::VectorXd point;
  Eigen::VectorXd multipliers;  // per row, 0 when inactive
};
OracleQpResult brute_force_qp(const Eigen::VectorXd& target, const Eigen::MatrixXd& C,
                              const Eigen::VectorXd& d, int n_eq, double tol = 1e-7);

/// Cheapest total price over all simple paths found by exhaustive DFS.
/// Returns +inf when the target is unreachable.
double cheapest_simple_path_price(const DataCenterFleet& fleet, DcId source, DcId target);

/// Random small scenario for property tests: connected fleet, jobs that keep
/// a configurable aggregate slack, nonnegative carbon grid.
struct RandomScenarioSpec {
  int min_dcs = 1, max_dcs = 3;
  int min_horizon = 1, max_horizon = 3;
  int min_jobs = 1, max_jobs = 3;
  double capacity_lo = 1.0, capacity_hi = 4.0;
  double slack_factor = 1.4;  // total capacity >= slack_factor * total volume
};
Scenario random_scenario(std::mt19937_64& rng, const RandomScenarioSpec& spec = {});

/// A capacity vector strictly inside the feasible set: componentwise margin
/// from the upper bounds where possible and aggregate surplus over the total
/// volume.
Eigen::VectorXd random_interior_x(const Scenario& scenario, std::mt19937_64& rng,
                                  double margin = 0.05);

/// Random point of { G_tilde y_tilde <= d } obtained by projecting a
/// perturbation of `center`; feasibility is verified before returning.
Eigen::VectorXd random_feasible_reduced(const GameMatrices& matrices, const Eigen::VectorXd& d,
                                        const Eigen::VectorXd& center, double radius,
                                        std::mt19937_64& rng);

/// Worst (most negative) inner product <F(y_bar), y' - y_bar> over sampled
/// feasible points y', where F stacks the per-team cost gradients. At an
/// exact variational equilibrium this is >= 0 for every feasible point.
double vi_worst_inner_product(const GameMatrices& matrices, const Eigen::VectorXd& x,
                              const EquilibriumResult& eq, int num_points, double radius,
                              std::mt19937_64& rng);

/// Solves the equilibrium program without variable elimination: projects
/// y_dagger - q/epsilon onto { A y = b } intersected with { G y <= h + Hx },
/// equalities handled explicitly. Used to cross-check the eliminated route.
Eigen::VectorXd direct_solve_game(const GameMatrices& matrices, const Eigen::VectorXd& x);

/// Potential value q^T y + eps/2 ||y - y_dagger||^2.
double potential_value(const GameMatrices& matrices, const Eigen::VectorXd& y);

/// Best response of one team with every other team's allocation frozen:
/// minimizes the team cost over its own block subject to its equalities,
/// nonnegativity and the residual capacity left by the others. Returns the
/// improvement eq_cost - best_cost (nonnegative when the equilibrium is not
/// exactly optimal for the team).
double best_response_improvement(const Scenario& scenario, const GameMatrices& matrices,
                                 const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq, int team);

}  // namespace vccopt::testing
