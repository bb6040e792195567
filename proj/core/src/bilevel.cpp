#include "vccopt/bilevel.hpp"

#include <chrono>
#include <cmath>

#include "vccopt/errors.hpp"
#include "vccopt/projection.hpp"

namespace vccopt {

VccFeasibleSet feasible_vcc_set(const Scenario& s) {
  const int d = s.dc_count();
  const int t = s.horizon;
  VccFeasibleSet set;
  set.upper.resize(d * t);
  std::vector<double> homed(static_cast<std::size_t>(d), 0.0);
  for (const ComputeJob& j : s.jobs) homed[static_cast<std::size_t>(j.home_dc - 1)] += j.volume;
  for (int dc = 0; dc < d; ++dc) {
    for (int tt = 0; tt < t; ++tt) {
      double ub = s.effective_capacity(dc, tt);
      if (tt == 0) ub = std::min(ub, homed[static_cast<std::size_t>(dc)]);
      set.upper(dc * t + tt) = ub;
    }
  }
  set.min_total = s.total_volume();
  return set;
}

VccVector project_onto_vcc_set(const Eigen::VectorXd& x_raw, const Scenario& s) {
  const VccFeasibleSet set = feasible_vcc_set(s);
  const int n = static_cast<int>(set.upper.size());
  if (x_raw.size() != n) throw Error("project_onto_vcc_set: x has wrong length");
  if (set.upper.sum() < set.min_total - 1e-12 * (1.0 + set.min_total)) {
    throw InfeasibleError("EmptyX: total capacity under the caps (" +
                          std::to_string(set.upper.sum()) + ") cannot cover the demand (" +
                          std::to_string(set.min_total) + ")");
  }

  Eigen::MatrixXd C(2 * n + 1, n);
  Eigen::VectorXd d(2 * n + 1);
  C.topRows(n) = Eigen::MatrixXd::Identity(n, n);
  d.head(n) = set.upper;
  C.middleRows(n, n) = -Eigen::MatrixXd::Identity(n, n);
  d.segment(n, n).setZero();
  C.row(2 * n) = Eigen::RowVectorXd::Constant(n, -1.0);
  d(2 * n) = -set.min_total;

  const ProjectionResult proj = project_onto_polyhedron(x_raw, C, d, 0);
  VccVector out;
  out.dcs = s.dc_count();
  out.horizon = s.horizon;
  out.values = proj.point;
  return out;
}

Eigen::VectorXd hypergradient(const Eigen::VectorXd& grad_x, const Eigen::VectorXd& grad_y,
                              const Eigen::MatrixXd& sensitivity_full) {
  if (sensitivity_full.rows() != grad_y.size() || sensitivity_full.cols() != grad_x.size()) {
    throw Error("hypergradient: shape mismatch");
  }
  return grad_x + sensitivity_full.transpose() * grad_y;
}

BilevelResult run_bilevel(const Scenario& s, const SolverParams& params) {
  using clock = std::chrono::steady_clock;
  const DecisionLayout layout = build_layout(s);
  const OperatorObjectiveParams obj =
      make_objective_params(s, params.p, params.xi, params.uniform_weight);
  const VccFeasibleSet set = feasible_vcc_set(s);

  // Capacity-shaped start: scale the upper profile to a 5% demand surplus,
  // then project.
  const double ub_total = set.upper.sum();
  const double frac = ub_total > 0.0 ? std::min(1.0, 1.05 * set.min_total / ub_total) : 0.0;
  VccVector x = project_onto_vcc_set(frac * set.upper, s);

  const GameMatrices matrices = assemble_game(s, params.epsilon);
  SolveOptions solve_opts;
  solve_opts.lambda_tol = params.lambda_tol;
  EquilibriumResult eq = solve_game(matrices, x.values);

  PhiEval pe = phi(s, layout, x.values, eq.y_star, obj);
  if (!std::isfinite(pe.value)) {
    throw NonFiniteObjective("phi_e is not finite at the initial point", SolverTrace{});
  }

  BilevelResult best;
  best.x = x;
  best.equilibrium = eq;
  best.phi_e = pe.value;

  SolverTrace trace;
  trace.final_status = "max_iterations";

  Eigen::MatrixXd sens = Eigen::MatrixXd::Zero(layout.n_y(), layout.n_x());
  double alpha0 = params.alpha0;
  SensitivityOptions sens_opts;
  sens_opts.lambda_tol = params.lambda_tol;

  for (int k = 0; k < params.k_max; ++k) {
    const auto t0 = clock::now();
    const Eigen::VectorXd grad = hypergradient(pe.grad_x, pe.grad_y, sens);
    const double grad_norm = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
    if (alpha0 <= 0.0) {
      const double scale = set.upper.size() ? set.upper.maxCoeff() : 1.0;
      alpha0 = 0.1 * std::max(scale, 1e-12) / (1.0 + grad_norm);
    }
    const double alpha = params.step_mode == StepMode::constant
                             ? alpha0
                             : alpha0 / std::pow(k + 1.0, params.decay);

    const VccVector x_next = project_onto_vcc_set(x.values - alpha * grad, s);
    const double step = (x_next.values - x.values).cwiseAbs().maxCoeff();

    solve_opts.warm_start = &eq;
    EquilibriumResult eq_next = solve_game(matrices, x_next.values, solve_opts);
    const SensitivityResult sr = compute_sensitivity(matrices, eq_next, x_next.values, sens_opts);
    PhiEval pe_next = phi(s, layout, x_next.values, eq_next.y_star, obj);

    TraceRecord rec;
    rec.k = k;
    rec.x = x.values;
    rec.phi_e = pe.value;
    rec.grad_norm = grad_norm;
    rec.alpha = alpha;
    rec.step_norm = step;
    rec.qp_iterations = eq_next.qp_iterations;
    rec.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
    trace.records.push_back(std::move(rec));

    if (!std::isfinite(pe_next.value)) {
      throw NonFiniteObjective("phi_e became non-finite at iteration " + std::to_string(k + 1),
                               std::move(trace));
    }

    x = x_next;
    eq = std::move(eq_next);
    pe = std::move(pe_next);
    sens = sr.jacobian_full;

    if (pe.value < best.phi_e) {
      best.x = x;
      best.equilibrium = eq;
      best.phi_e = pe.value;
    }
    const double x_scale = x.values.size() ? x.values.cwiseAbs().maxCoeff() : 0.0;
    if (step <= params.tol_x * (1.0 + x_scale)) {
      trace.final_status = "converged";
      break;
    }
  }
  if (params.k_max == 0) trace.final_status = "converged";
  best.trace = std::move(trace);
  return best;
}

}  // namespace vccopt
