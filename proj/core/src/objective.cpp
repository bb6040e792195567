#include "vccopt/objective.hpp"

#include <cmath>

#include "vccopt/errors.hpp"

namespace vccopt {

OperatorObjectiveParams make_objective_params(const Scenario& s, int p, double xi,
                                              double uniform_weight) {
  if (p < 2 || p % 2 != 0) throw ValidationError("peak exponent p must be an even integer >= 2");
  if (xi < 0.0) throw ValidationError("migration weight xi must be nonnegative");
  if (uniform_weight < 0.0) throw ValidationError("uniform_weight must be nonnegative");
  OperatorObjectiveParams out;
  out.rho = s.carbon_intensity;
  out.p = p;
  out.xi = xi;
  out.uniform_weight = uniform_weight;
  return out;
}

double peak_norm(const Eigen::MatrixXd& loads, int p) {
  if (p < 2 || p % 2 != 0) throw ValidationError("peak exponent p must be an even integer >= 2");
  double total = 0.0;
  for (Eigen::Index d = 0; d < loads.rows(); ++d) {
    const Eigen::ArrayXd row = loads.row(d).array().max(0.0);
    const double m = row.maxCoeff();
    if (m <= 0.0) continue;
    const double s = (row / m).pow(p).sum();
    total += m * std::pow(s, 1.0 / p);
  }
  return total;
}

Eigen::MatrixXd peak_norm_gradient(const Eigen::MatrixXd& loads, int p) {
  if (p < 2 || p % 2 != 0) throw ValidationError("peak exponent p must be an even integer >= 2");
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(loads.rows(), loads.cols());
  for (Eigen::Index d = 0; d < loads.rows(); ++d) {
    const Eigen::ArrayXd row = loads.row(d).array().max(0.0);
    const double m = row.maxCoeff();
    if (m <= 0.0) continue;
    const Eigen::ArrayXd scaled = row / m;
    const double s = scaled.pow(p).sum();
    // d/dL (sum L^p)^(1/p) = (sum L^p)^(1/p-1) * L^(p-1), in scaled form.
    grad.row(d) = (scaled.pow(p - 1) * std::pow(s, 1.0 / p - 1.0)).matrix().transpose();
  }
  return grad;
}

double migration_cost(const Scenario& s, const DecisionLayout& l, const Eigen::VectorXd& y) {
  double total = 0.0;
  for (int i = 0; i < l.jobs; ++i) {
    const ComputeJob& cj = s.jobs[static_cast<std::size_t>(i)];
    for (int d = 1; d <= l.dcs; ++d) {
      const double price = cj.priority * s.migration_price(i, d);
      if (price == 0.0) continue;
      for (int t = 1; t <= l.horizon - 1; ++t) {
        total += y(l.z_index(i, d, t)) * price;
      }
    }
  }
  return total;
}

PhiEval phi(const Scenario& s, const DecisionLayout& l, const Eigen::VectorXd& x,
            const Eigen::VectorXd& y, const OperatorObjectiveParams& params) {
  if (x.size() != l.n_x() || y.size() != l.n_y()) throw Error("phi: shape mismatch");
  if (params.rho.rows() != l.dcs || params.rho.cols() != l.horizon) {
    throw Error("phi: rho grid has wrong shape");
  }

  PhiEval out;
  const Eigen::MatrixXd loads = aggregate_loads(l, y);
  out.carbon = (params.rho.array() * loads.array()).sum();
  out.peak = peak_norm(loads, params.p);
  out.migration = migration_cost(s, l, y);
  out.uniform = 0.5 * params.uniform_weight * x.sum();
  out.value = out.carbon + out.peak + params.xi * out.migration + out.uniform;

  out.grad_x = Eigen::VectorXd::Constant(l.n_x(), 0.5 * params.uniform_weight);

  out.grad_y = Eigen::VectorXd::Zero(l.n_y());
  const Eigen::MatrixXd peak_grad = peak_norm_gradient(loads, params.p);
  for (int i = 0; i < l.jobs; ++i) {
    const ComputeJob& cj = s.jobs[static_cast<std::size_t>(i)];
    for (int d = 1; d <= l.dcs; ++d) {
      for (int t = 1; t <= l.horizon; ++t) {
        out.grad_y(l.y_index(i, d, t)) = params.rho(d - 1, t - 1) + peak_grad(d - 1, t - 1);
      }
      const double price = params.xi * cj.priority * s.migration_price(i, d);
      for (int t = 1; t <= l.horizon - 1; ++t) {
        out.grad_y(l.z_index(i, d, t)) = price;
      }
    }
  }
  return out;
}

}  // namespace vccopt
