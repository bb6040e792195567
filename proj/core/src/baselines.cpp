#include "vccopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vccopt/errors.hpp"
#include "vccopt/objective.hpp"

namespace vccopt {

BaselineResult naive_schedule(const Scenario& s) {
  const DecisionLayout l = build_layout(s);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(l.n_y());
  Eigen::MatrixXd remaining = s.effective_capacity;

  std::vector<int> order(s.jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const ComputeJob& ja = s.jobs[static_cast<std::size_t>(a)];
    const ComputeJob& jb = s.jobs[static_cast<std::size_t>(b)];
    if (ja.priority != jb.priority) return ja.priority > jb.priority;
    return ja.id < jb.id;
  });

  for (int i : order) {
    const ComputeJob& cj = s.jobs[static_cast<std::size_t>(i)];
    const int home = cj.home_dc;
    double rem = cj.volume;
    for (int t = 1; t <= l.horizon && rem > 0.0; ++t) {
      const double a = std::min(rem, remaining(home - 1, t - 1));
      if (a <= 0.0) continue;
      y(l.y_index(i, home, t)) = a;
      remaining(home - 1, t - 1) -= a;
      rem -= a;
    }
    if (rem > 1e-9 * cj.volume) {
      throw InfeasibleError("naive schedule infeasible: job " + std::to_string(cj.id) +
                            " exceeds its home DC capacity over the horizon by " +
                            std::to_string(rem));
    }
    double executed = 0.0;
    for (int t = 1; t <= l.horizon - 1; ++t) {
      executed += y(l.y_index(i, home, t));
      y(l.z_index(i, home, t)) = cj.volume - executed;  // queue, no migration
    }
  }

  BaselineResult out;
  out.label = "naive";
  out.x_used.dcs = l.dcs;
  out.x_used.horizon = l.horizon;
  out.x_used.values.resize(l.n_x());
  for (int d = 1; d <= l.dcs; ++d) {
    for (int t = 1; t <= l.horizon; ++t) {
      out.x_used.values(l.x_index(d, t)) = s.effective_capacity(d - 1, t - 1);
    }
  }
  out.y = std::move(y);
  out.metrics = compute_metrics(s, l, out.y);
  return out;
}

Eigen::VectorXd project_box_halfspace(const Eigen::VectorXd& x_raw, const Eigen::VectorXd& upper,
                                      double min_total) {
  if (upper.sum() < min_total - 1e-12 * (1.0 + std::abs(min_total))) {
    throw InfeasibleError("EmptyX: box cannot cover the demand halfspace");
  }
  Eigen::VectorXd x0 = x_raw.cwiseMin(upper).cwiseMax(0.0);
  if (x0.sum() >= min_total) return x0;

  auto value_at = [&](double mu) {
    return (x_raw.array() + mu).min(upper.array()).max(0.0).matrix();
  };
  double lo = 0.0;
  double hi = (upper - x_raw).maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(mid).sum() < min_total) lo = mid;
    else hi = mid;
  }
  return value_at(hi);
}

namespace {

// Accelerated projected gradient with function-value restarts on
//   f(x) = <rho, x> + peak_norm(x)
// over the operator's capacity set.
Eigen::VectorXd minimize_capacity_proxy(const Scenario& s, int p, const VccFeasibleSet& set) {
  const int d = s.dc_count();
  const int t = s.horizon;
  const int n = d * t;

  Eigen::VectorXd rho_flat(n);
  for (int dc = 0; dc < d; ++dc) {
    for (int tt = 0; tt < t; ++tt) rho_flat(dc * t + tt) = s.carbon_intensity(dc, tt);
  }
  auto as_grid = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g(d, t);
    for (int dc = 0; dc < d; ++dc) g.row(dc) = x.segment(dc * t, t).transpose();
    return g;
  };
  auto f = [&](const Eigen::VectorXd& x) {
    return rho_flat.dot(x) + peak_norm(as_grid(x), p);
  };
  auto grad = [&](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd pg = peak_norm_gradient(as_grid(x), p);
    Eigen::VectorXd g = rho_flat;
    for (int dc = 0; dc < d; ++dc) g.segment(dc * t, t) += pg.row(dc).transpose();
    return g;
  };
  auto project = [&](const Eigen::VectorXd& x) {
    return project_box_halfspace(x, set.upper, set.min_total);
  };

  const double ub_total = set.upper.sum();
  const double frac = ub_total > 0.0 ? std::min(1.0, 1.05 * set.min_total / ub_total) : 0.0;
  Eigen::VectorXd x = project(frac * set.upper);
  Eigen::VectorXd x_prev = x;
  double fx = f(x);
  double step = 1.0 / (1.0 + grad(x).cwiseAbs().maxCoeff());
  double theta = 1.0;
  int stagnant = 0;

  const int max_iter = 100000;
  for (int it = 0; it < max_iter; ++it) {
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double beta = (theta - 1.0) / theta_next;
    Eigen::VectorXd y_acc = x + beta * (x - x_prev);
    Eigen::VectorXd g = grad(y_acc);
    const double fy = f(y_acc);

    Eigen::VectorXd x_next;
    for (int bt = 0; bt < 60; ++bt) {
      x_next = project(y_acc - step * g);
      const Eigen::VectorXd diff = x_next - y_acc;
      if (f(x_next) <= fy + g.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-15) break;
      step *= 0.5;
    }
    double fn = f(x_next);
    if (fn > fx) {
      // Restart the momentum from the last monotone point.
      theta = 1.0;
      x_prev = x;
      g = grad(x);
      for (int bt = 0; bt < 60; ++bt) {
        x_next = project(x - step * g);
        const Eigen::VectorXd diff = x_next - x;
        if (f(x_next) <= fx + g.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-15) break;
        step *= 0.5;
      }
      fn = f(x_next);
      if (fn > fx) {
        x_next = x;  // no descent possible at this resolution
        fn = fx;
      }
    } else {
      theta = theta_next;
    }

    const double move = (x_next - x).cwiseAbs().maxCoeff();
    const bool tiny_move = move <= 1e-11 * (1.0 + x.cwiseAbs().maxCoeff());
    const bool tiny_gain = std::abs(fx - fn) <= 1e-14 * (1.0 + std::abs(fx));
    x_prev = x;
    x = std::move(x_next);
    fx = fn;
    step = std::min(step * 1.25, 1e6);
    stagnant = (tiny_move && tiny_gain) ? stagnant + 1 : 0;
    if (stagnant >= 25) break;
  }
  return x;
}

}  // namespace

BaselineResult sequential_optimize(const Scenario& s, const SolverParams& params) {
  const VccFeasibleSet set = feasible_vcc_set(s);
  if (set.upper.sum() < set.min_total - 1e-12 * (1.0 + set.min_total)) {
    throw InfeasibleError("EmptyX: capacity set cannot cover the demand");
  }
  const Eigen::VectorXd x_bar = minimize_capacity_proxy(s, params.p, set);

  const GameMatrices matrices = assemble_game(s, params.epsilon);
  SolveOptions opts;
  opts.lambda_tol = params.lambda_tol;
  const EquilibriumResult eq = solve_game(matrices, x_bar, opts);

  BaselineResult out;
  out.label = "sequential";
  out.x_used.dcs = s.dc_count();
  out.x_used.horizon = s.horizon;
  out.x_used.values = x_bar;
  out.y = eq.y_star;
  out.metrics = compute_metrics(s, matrices.layout, out.y, params.p);
  return out;
}

}  // namespace vccopt
