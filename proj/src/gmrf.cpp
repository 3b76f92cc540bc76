#include "exlgm/gmrf.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "exlgm/errors.hpp"

namespace exlgm {

namespace {

// lattice stiffness matrix: G_ii = #neighbors, G_ij = -1 for 4-neighbors.
// Rows sum to zero, which is the zero-flux (Neumann) boundary condition.
SparseMatrixd lattice_stiffness(const LatticeMesh& mesh) {
  const int nx = mesh.nx, ny = mesh.ny;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int k = mesh.index(i, j);
      int deg = 0;
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int t = 0; t < 4; ++t) {
        const int ii = i + di[t], jj = j + dj[t];
        if (ii >= 0 && ii < nx && jj >= 0 && jj < ny) {
          ++deg;
          trips.emplace_back(k, mesh.index(ii, jj), -1.0);
        }
      }
      trips.emplace_back(k, k, static_cast<double>(deg));
    }
  }
  SparseMatrixd G(nx * ny, nx * ny);
  G.setFromTriplets(trips.begin(), trips.end());
  return G;
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) < 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, m, fa, flm, fm, tol * 0.5, depth - 1) +
         simpson(f, m, b, fm, frm, fb, tol * 0.5, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  // pilot pass fixes the absolute tolerance scale
  double pilot = 0.0;
  const int pn = 64;
  for (int i = 0; i < pn; ++i) {
    const double x0 = a + (b - a) * i / pn;
    const double x1 = a + (b - a) * (i + 1) / pn;
    pilot += (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
  }
  const double tol = rel_tol * std::max(std::abs(pilot), 1e-300);
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(m), f(b), tol, 32);
}

}  // namespace

double lattice_variance_factor(double a) {
  // outside this window the range is absurd relative to the mesh spacing and
  // the quadrature cost explodes; build_precision guards accordingly
  if (!(a >= 1e-8 && a <= 1e8))
    throw invalid_input("lattice_variance_factor: kappa^2 h^2 out of range");
  struct Memo {
    double a = -1.0;
    double f = 0.0;
  };
  thread_local std::array<Memo, 8> memo{};
  thread_local std::size_t next = 0;
  for (const auto& mrec : memo)
    if (mrec.a == a) return mrec.f;
  // (1/(2pi)^2) int_{[-pi,pi]^2} dw / (a + 4 - 2cos w1 - 2cos w2)^2, with the
  // inner integral reduced analytically: int_0^pi dt/(b - 2cos t)^2 = pi b (b^2-4)^{-3/2}
  auto f = [a](double w) {
    const double b = a + 4.0 - 2.0 * std::cos(w);
    return b / std::pow(b * b - 4.0, 1.5);
  };
  const double pi = 3.14159265358979323846;
  const double val = integrate(f, 0.0, pi, 1e-12) / pi;
  memo[next] = {a, val};
  next = (next + 1) % memo.size();
  return val;
}

SparseMatrixd build_precision(const LatticeMesh& mesh, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw invalid_input("range parameter must be positive");
  if (mesh.node_count() < 4) throw invalid_input("mesh too small for a precision matrix");
  const double h = mesh.spacing;
  const double kappa = std::sqrt(8.0) / rho;
  const double a = kappa * kappa * h * h;
  const double tau2 = h * h * lattice_variance_factor(a);

  const SparseMatrixd G = lattice_stiffness(mesh);
  SparseMatrixd I(mesh.node_count(), mesh.node_count());
  I.setIdentity();
  SparseMatrixd Q = tau2 * (std::pow(kappa, 4) * h * h * I + 2.0 * kappa * kappa * G +
                            SparseMatrixd(G * G) / (h * h));
  Q.makeCompressed();
  return Q;
}

void SparseChol::factorize(const SparseMatrixd& Q) {
  if (Q.rows() != Q.cols()) throw invalid_input("SparseChol: matrix must be square");
  if (!analyzed_ || solver_.rows() != Q.rows()) {
    solver_.analyzePattern(Q);
    analyzed_ = true;
  }
  solver_.factorize(Q);
  if (solver_.info() != Eigen::Success || solver_.vectorD().minCoeff() <= 0.0)
    throw not_positive_definite("sparse Cholesky factorization failed");
}

double SparseChol::log_det() const { return solver_.vectorD().array().log().sum(); }

Eigen::VectorXd SparseChol::solve(const Eigen::VectorXd& b) const { return solver_.solve(b); }

Eigen::VectorXd SparseChol::sample_zero_mean(Rng& rng) const {
  const Eigen::Index n = solver_.rows();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  // Q = P' L D L' P  =>  x = P' L^-T D^-1/2 z has covariance Q^-1
  Eigen::VectorXd w = z.array() / solver_.vectorD().array().sqrt();
  Eigen::VectorXd v = solver_.matrixU().solve(w);
  return solver_.permutationPinv() * v;
}

Eigen::VectorXd gmrf_sample(const SparseMatrixd& Q, double s, Rng& rng) {
  if (!(s > 0.0) || !std::isfinite(s)) throw invalid_input("gmrf_sample: scale must be positive");
  SparseChol chol;
  chol.factorize(Q);
  return s * chol.sample_zero_mean(rng);
}

double gmrf_log_density(const Eigen::VectorXd& x, const SparseMatrixd& Q, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw invalid_input("gmrf_log_density: scale must be positive");
  if (x.size() != Q.rows()) throw invalid_input("gmrf_log_density: dimension mismatch");
  SparseChol chol;
  chol.factorize(Q);
  const double d = static_cast<double>(x.size());
  const double quad = x.dot(Q * x) / (s * s);
  constexpr double log2pi = 1.8378770664093454836;
  return -0.5 * d * log2pi - d * std::log(s) + 0.5 * chol.log_det() - 0.5 * quad;
}

}  // namespace exlgm
