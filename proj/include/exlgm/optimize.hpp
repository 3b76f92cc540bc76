#pragma once

#include <Eigen/Dense>
#include <functional>

namespace exlgm {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimOptions {
  int max_iterations = 500;
  /// Convergence when the max-norm of the finite-difference gradient drops
  /// below gradient_tol * max(1, |f|).
  double gradient_tol = 1e-8;
  double fd_step_rel = 1e-6;  ///< relative step of the central-difference gradient
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;
};

/// Central-difference gradient with per-coordinate step rel_step * max(1, |x_i|).
Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x,
                            double rel_step = 1e-6);

/// Central second-difference Hessian with per-coordinate step
/// rel_step * max(1, |x_i|); symmetric by construction.
Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& x,
                           double rel_step = 1e-4);

/// BFGS with a backtracking Armijo line search and numerical gradients.
/// The objective may return +infinity outside its domain; the line search
/// backtracks out of such regions. The start point must be feasible.
OptimResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                          const OptimOptions& opts = {});

}  // namespace exlgm
