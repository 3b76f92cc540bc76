#include "exlgm/optimize.hpp"

#include <cmath>
#include <limits>

#include "exlgm/errors.hpp"

namespace exlgm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double step_size(double xi, double rel) { return rel * std::max(1.0, std::abs(xi)); }
}  // namespace

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = step_size(x[i], rel_step);
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[i] = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp)) {
      g[i] = (fp - f(x)) / h;
    } else if (std::isfinite(fm)) {
      g[i] = (f(x) - fm) / h;
    } else {
      throw numeric_error("fd_gradient: objective not finite near evaluation point");
    }
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& x, double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd H(n, n);
  const double f0 = f(x);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double hi = step_size(x[i], rel_step);
      double hj = step_size(x[j], rel_step);
      double v = kInf;
      for (int attempt = 0; attempt < 8 && !std::isfinite(v); ++attempt) {
        if (i == j) {
          xp[i] = x[i] + hi;
          const double fp = f(xp);
          xp[i] = x[i] - hi;
          const double fm = f(xp);
          xp[i] = x[i];
          v = (fp - 2.0 * f0 + fm) / (hi * hi);
        } else {
          auto at = [&](double di, double dj) {
            xp[i] = x[i] + di;
            xp[j] = x[j] + dj;
            const double fv = f(xp);
            xp[i] = x[i];
            xp[j] = x[j];
            return fv;
          };
          v = (at(hi, hj) - at(hi, -hj) - at(-hi, hj) + at(-hi, -hj)) / (4.0 * hi * hj);
        }
        hi *= 0.5;
        hj *= 0.5;
      }
      if (!std::isfinite(v)) throw numeric_error("fd_hessian: objective not finite near evaluation point");
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  return 0.5 * (H + H.transpose());
}

OptimResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const OptimOptions& opts) {
  const Eigen::Index n = x0.size();
  OptimResult res;
  res.x = x0;
  res.value = f(x0);
  if (!std::isfinite(res.value)) throw numeric_error("minimize_bfgs: infeasible start point");

  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = fd_gradient(f, res.x, opts.fd_step_rel);
  const auto scaled_tol = [&](double tol) { return tol * std::max(1.0, std::abs(res.value)); };

  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    if (g.lpNorm<Eigen::Infinity>() < scaled_tol(opts.gradient_tol)) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd d = -Hinv * g;
    double gd = g.dot(d);
    if (!(gd < 0.0)) {  // not a descent direction; reset to steepest descent
      Hinv.setIdentity();
      d = -g;
      gd = g.dot(d);
    }
    // backtracking Armijo line search
    double t = 1.0;
    double f_new = kInf;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = res.x + t * d;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= res.value + 1e-4 * t * gd) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // stalled; convergence judged below

    Eigen::VectorXd g_new = fd_gradient(f, x_new, opts.fd_step_rel);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::VectorXd Hy = Hinv * y;
      const double yHy = y.dot(Hy);
      // BFGS inverse update
      Hinv += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
              (Hy * s.transpose() + s * Hy.transpose()) / sy;
    }
    res.x = x_new;
    res.value = f_new;
    g = g_new;
  }

  if (!res.converged) res.converged = g.lpNorm<Eigen::Infinity>() < scaled_tol(1e-5);
  res.gradient = g;
  return res;
}

}  // namespace exlgm
