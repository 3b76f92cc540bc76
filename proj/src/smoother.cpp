#include "exlgm/smoother.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "exlgm/errors.hpp"
#include "exlgm/stats.hpp"

namespace exlgm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;
}  // namespace

void ChainConfig::validate() const {
  if (n_iterations <= 0 || n_burnin < 0 || n_burnin >= n_iterations)
    throw invalid_input("chain: need 0 <= n_burnin < n_iterations");
  if (thin < 1) throw invalid_input("chain: thin must be >= 1");
  if ((n_iterations - n_burnin) % thin != 0)
    throw invalid_input("chain: (n_iterations - n_burnin) must be a multiple of thin");
  for (double s : proposal_scales)
    if (!(s >= 0.0)) throw invalid_input("chain: proposal scales must be nonnegative");
}

SparseMatrixd assemble_design(int n_sites, const SparseMatrixd& A) {
  if (A.rows() != n_sites) throw invalid_input("assemble_design: projection row count mismatch");
  const int m = static_cast<int>(A.cols());
  const int cols = 3 + 2 * m;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros()) * 2 + 3 * static_cast<std::size_t>(n_sites));
  // nu layout: beta_psi | u_psi (m) | beta_tau | u_tau (m) | beta_phi
  for (int i = 0; i < n_sites; ++i) {
    trips.emplace_back(i, 0, 1.0);
    trips.emplace_back(n_sites + i, m + 1, 1.0);
    trips.emplace_back(2 * n_sites + i, 2 * m + 2, 1.0);
  }
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrixd::InnerIterator it(A, k); it; ++it) {
      trips.emplace_back(static_cast<int>(it.row()), 1 + static_cast<int>(it.col()), it.value());
      trips.emplace_back(n_sites + static_cast<int>(it.row()), m + 2 + static_cast<int>(it.col()),
                         it.value());
    }
  SparseMatrixd Z(3 * n_sites, cols);
  Z.setFromTriplets(trips.begin(), trips.end());
  Z.makeCompressed();
  return Z;
}

SmoothModel::SmoothModel(Eigen::VectorXd eta_hat, SparseMatrixd q_data, const LatticeMesh& mesh,
                         SparseMatrixd projection, PriorConfig prior)
    : mesh_(mesh),
      A_(std::move(projection)),
      eta_hat_(std::move(eta_hat)),
      q_data_(std::move(q_data)),
      prior_(prior) {
  prior_.validate();
  n_ = static_cast<int>(A_.rows());
  m_ = mesh_.node_count();
  if (A_.cols() != m_) throw invalid_input("smooth model: projection/mesh mismatch");
  if (eta_hat_.size() != 3 * n_) throw invalid_input("smooth model: eta_hat must have length 3N");
  if (q_data_.rows() != 3 * n_ || q_data_.cols() != 3 * n_)
    throw invalid_input("smooth model: Q_data must be 3N x 3N");
  Z_ = assemble_design(n_, A_);
  SparseChol chol;
  chol.factorize(q_data_);
  log_det_q_data_ = chol.log_det();
  rhs_ = Eigen::VectorXd::Zero(latent_dim());
  rhs_.head(3 * n_) = q_data_ * eta_hat_;
}

SmoothModel SmoothModel::from_fits(const std::vector<SiteFit>& fits, const LatticeMesh& mesh,
                                   PriorConfig prior) {
  if (fits.empty()) throw invalid_input("smooth model: no site fits");
  const int n = static_cast<int>(fits.size());
  Eigen::VectorXd eta(3 * n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * static_cast<std::size_t>(n));
  std::vector<Eigen::Vector2d> coords;
  coords.reserve(fits.size());
  for (int i = 0; i < n; ++i) {
    const auto& f = fits[static_cast<std::size_t>(i)];
    eta[i] = f.eta_hat.psi;
    eta[n + i] = f.eta_hat.tau;
    eta[2 * n + i] = f.eta_hat.phi;
    const int ids[3] = {i, n + i, 2 * n + i};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) trips.emplace_back(ids[a], ids[b], f.info(a, b));
    coords.emplace_back(f.lon, f.lat);
  }
  SparseMatrixd qd(3 * n, 3 * n);
  qd.setFromTriplets(trips.begin(), trips.end());
  qd.makeCompressed();
  return SmoothModel(std::move(eta), std::move(qd), mesh, build_projection(mesh, coords), prior);
}

SparseMatrixd SmoothModel::posterior_precision(const HyperParameters& theta) const {
  return posterior_precision(theta, build_precision(mesh_, theta.rho_psi),
                             build_precision(mesh_, theta.rho_tau));
}

SparseMatrixd SmoothModel::posterior_precision(const HyperParameters& theta,
                                               const SparseMatrixd& Q_rho_psi,
                                               const SparseMatrixd& Q_rho_tau) const {
  theta.validate();
  const int N = n_, m = m_;
  const int D = latent_dim();

  Eigen::VectorXd qeps(3 * N);
  qeps.head(N).setConstant(1.0 / (theta.sigma_psi * theta.sigma_psi));
  qeps.segment(N, N).setConstant(1.0 / (theta.sigma_tau * theta.sigma_tau));
  qeps.tail(N).setConstant(1.0 / (theta.sigma_phi * theta.sigma_phi));

  const SparseMatrixd QeZ = qeps.asDiagonal() * Z_;
  const SparseMatrixd ZtQeZ = Z_.transpose() * QeZ;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(q_data_.nonZeros()) + 3 * static_cast<std::size_t>(N) +
                2 * static_cast<std::size_t>(QeZ.nonZeros()) +
                static_cast<std::size_t>(ZtQeZ.nonZeros()) +
                2 * static_cast<std::size_t>(Q_rho_psi.nonZeros()) + 3);
  for (int k = 0; k < q_data_.outerSize(); ++k)
    for (SparseMatrixd::InnerIterator it(q_data_, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int i = 0; i < 3 * N; ++i) trips.emplace_back(i, i, qeps[i]);
  for (int k = 0; k < QeZ.outerSize(); ++k)
    for (SparseMatrixd::InnerIterator it(QeZ, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = 3 * N + static_cast<int>(it.col());
      trips.emplace_back(r, c, -it.value());
      trips.emplace_back(c, r, -it.value());
    }
  for (int k = 0; k < ZtQeZ.outerSize(); ++k)
    for (SparseMatrixd::InnerIterator it(ZtQeZ, k); it; ++it)
      trips.emplace_back(3 * N + static_cast<int>(it.row()), 3 * N + static_cast<int>(it.col()),
                         it.value());
  // Q_nu = bdiag(1/sigma_beta^2, Q_rho_psi/s_psi^2, 1/sigma_beta^2, Q_rho_tau/s_tau^2, 1/sigma_beta^2)
  const double qb = 1.0 / prior_.sigma_beta_sq;
  const int o_bpsi = 3 * N, o_upsi = 3 * N + 1, o_btau = 3 * N + m + 1, o_utau = 3 * N + m + 2,
            o_bphi = 3 * N + 2 * m + 2;
  trips.emplace_back(o_bpsi, o_bpsi, qb);
  trips.emplace_back(o_btau, o_btau, qb);
  trips.emplace_back(o_bphi, o_bphi, qb);
  const double inv_s_psi2 = 1.0 / (theta.s_psi * theta.s_psi);
  const double inv_s_tau2 = 1.0 / (theta.s_tau * theta.s_tau);
  for (int k = 0; k < Q_rho_psi.outerSize(); ++k)
    for (SparseMatrixd::InnerIterator it(Q_rho_psi, k); it; ++it)
      trips.emplace_back(o_upsi + static_cast<int>(it.row()), o_upsi + static_cast<int>(it.col()),
                         inv_s_psi2 * it.value());
  for (int k = 0; k < Q_rho_tau.outerSize(); ++k)
    for (SparseMatrixd::InnerIterator it(Q_rho_tau, k); it; ++it)
      trips.emplace_back(o_utau + static_cast<int>(it.row()), o_utau + static_cast<int>(it.col()),
                         inv_s_tau2 * it.value());

  SparseMatrixd Q(D, D);
  Q.setFromTriplets(trips.begin(), trips.end());
  Q.makeCompressed();
  return Q;
}

double SmoothModel::log_hyper_prior(const HyperParameters& t) const {
  return pc_prior_nugget_log(t.sigma_psi, prior_.lambda_sigma_psi) +
         pc_prior_nugget_log(t.sigma_tau, prior_.lambda_sigma_tau) +
         pc_prior_nugget_log(t.sigma_phi, prior_.lambda_sigma_phi) +
         pc_prior_matern_log(t.s_psi, t.rho_psi, prior_.lambda_s_psi, prior_.lambda_rho_psi) +
         pc_prior_matern_log(t.s_tau, t.rho_tau, prior_.lambda_s_tau, prior_.lambda_rho_tau);
}

SmoothWorkspace::SmoothWorkspace(const SmoothModel& model) : model_(model) {}

const Eigen::VectorXd& SmoothWorkspace::refresh(const HyperParameters& theta) {
  const SparseMatrixd Q = model_.posterior_precision(theta);
  chol_post_.factorize(Q);
  mean_ = chol_post_.solve(model_.rhs());
  loaded_ = true;
  return mean_;
}

Eigen::VectorXd SmoothWorkspace::draw_latent(Rng& rng) {
  if (!loaded_) throw numeric_error("draw_latent before refresh");
  return mean_ + chol_post_.sample_zero_mean(rng);
}

double SmoothWorkspace::log_marginal_hyper(const HyperParameters& theta,
                                           const std::optional<Eigen::VectorXd>& x_star) {
  const int N = model_.n_sites();
  const int m = model_.n_mesh_nodes();
  const int D = model_.latent_dim();
  const int K = 3 + 2 * m;

  double lp_theta;
  try {
    theta.validate();
    lp_theta = model_.log_hyper_prior(theta);

    const SparseMatrixd Q_rho_psi = build_precision(model_.mesh(), theta.rho_psi);
    const SparseMatrixd Q_rho_tau = build_precision(model_.mesh(), theta.rho_tau);
    chol_rho_psi_.factorize(Q_rho_psi);
    chol_rho_tau_.factorize(Q_rho_tau);
    const double ld_rho_psi = chol_rho_psi_.log_det();
    const double ld_rho_tau = chol_rho_tau_.log_det();

    const SparseMatrixd Q_post = model_.posterior_precision(theta, Q_rho_psi, Q_rho_tau);
    chol_post_.factorize(Q_post);
    mean_ = chol_post_.solve(model_.rhs());
    loaded_ = true;

    const Eigen::VectorXd& x = x_star ? *x_star : mean_;
    if (x.size() != D) throw invalid_input("log_marginal_hyper: x* has wrong dimension");
    const auto eta = x.head(3 * N);
    const auto nu = x.tail(K);

    // log pi(eta | nu, theta): Normal(Z nu, Q_eps^-1)
    Eigen::VectorXd qeps(3 * N);
    qeps.head(N).setConstant(1.0 / (theta.sigma_psi * theta.sigma_psi));
    qeps.segment(N, N).setConstant(1.0 / (theta.sigma_tau * theta.sigma_tau));
    qeps.tail(N).setConstant(1.0 / (theta.sigma_phi * theta.sigma_phi));
    const Eigen::VectorXd resid = eta - model_.design() * nu;
    const double ld_qeps = qeps.array().log().sum();
    const double lp_eta = -0.5 * 3 * N * kLog2Pi + 0.5 * ld_qeps -
                          0.5 * (resid.array().square() * qeps.array()).sum();

    // log pi(nu | theta)
    const double qb = 1.0 / model_.prior().sigma_beta_sq;
    const double b_psi = nu[0], b_tau = nu[m + 1], b_phi = nu[2 * m + 2];
    const auto u_psi = nu.segment(1, m);
    const auto u_tau = nu.segment(m + 2, m);
    const double ld_qnu = -3.0 * std::log(model_.prior().sigma_beta_sq) +
                          (ld_rho_psi - 2.0 * m * std::log(theta.s_psi)) +
                          (ld_rho_tau - 2.0 * m * std::log(theta.s_tau));
    const double quad_nu = qb * (b_psi * b_psi + b_tau * b_tau + b_phi * b_phi) +
                           u_psi.dot(Q_rho_psi * u_psi) / (theta.s_psi * theta.s_psi) +
                           u_tau.dot(Q_rho_tau * u_tau) / (theta.s_tau * theta.s_tau);
    const double lp_nu = -0.5 * K * kLog2Pi + 0.5 * ld_qnu - 0.5 * quad_nu;

    // log pi(eta_hat | eta): Normal(eta, Q_data^-1)
    const Eigen::VectorXd rd = model_.eta_hat() - eta;
    const double lp_data = -0.5 * 3 * N * kLog2Pi + 0.5 * model_.log_det_q_data_ -
                           0.5 * rd.dot(model_.q_data() * rd);

    // log pi(x | eta_hat, theta): Normal(mean, Q_post^-1)
    const Eigen::VectorXd rp = x - mean_;
    const double lp_post =
        -0.5 * D * kLog2Pi + 0.5 * chol_post_.log_det() - 0.5 * rp.dot(Q_post * rp);

    return lp_eta + lp_nu + lp_data - lp_post + lp_theta;
  } catch (const not_positive_definite&) {
    loaded_ = false;
    return -kInf;
  } catch (const invalid_input&) {
    if (x_star) throw;  // a caller-provided x* of the wrong shape is a bug
    loaded_ = false;
    return -kInf;
  }
}

FullConditional latent_full_conditional(const SmoothModel& model, const HyperParameters& theta) {
  SmoothWorkspace ws(model);
  FullConditional fc;
  fc.precision = model.posterior_precision(theta);
  fc.mean = ws.refresh(theta);
  return fc;
}

Eigen::VectorXd gibbs_draw_latent(const SmoothModel& model, const HyperParameters& theta,
                                  Rng& rng) {
  SmoothWorkspace ws(model);
  ws.refresh(theta);
  return ws.draw_latent(rng);
}

double log_marginal_hyper(const SmoothModel& model, const HyperParameters& theta,
                          const std::optional<Eigen::VectorXd>& x_star) {
  SmoothWorkspace ws(model);
  return ws.log_marginal_hyper(theta, x_star);
}

HyperParameters chain_start(const SmoothModel& model) {
  const int N = model.n_sites();
  const Eigen::VectorXd& eta = model.eta_hat();
  std::vector<double> se_psi, se_tau, se_phi;
  const auto& qd = model.q_data();
  for (int i = 0; i < N; ++i) {
    se_psi.push_back(1.0 / std::sqrt(qd.coeff(i, i)));
    se_tau.push_back(1.0 / std::sqrt(qd.coeff(N + i, N + i)));
    se_phi.push_back(1.0 / std::sqrt(qd.coeff(2 * N + i, 2 * N + i)));
  }
  auto block_sd = [&](int offset) {
    std::vector<double> v(eta.data() + offset, eta.data() + offset + N);
    return N > 1 ? sample_sd(v) : 0.1;
  };
  const auto& mesh = model.mesh();
  const double diam = mesh.spacing * std::hypot(mesh.nx - 1.0, mesh.ny - 1.0);
  HyperParameters t;
  t.sigma_psi = std::max(0.5 * quantile_type7(se_psi, 0.5), 0.01);
  t.sigma_tau = std::max(0.5 * quantile_type7(se_tau, 0.5), 0.01);
  t.sigma_phi = std::max(0.5 * quantile_type7(se_phi, 0.5), 0.01);
  t.s_psi = std::max(block_sd(0), 0.05);
  t.s_tau = std::max(block_sd(N), 0.05);
  t.rho_psi = 0.25 * diam;
  t.rho_tau = 0.25 * diam;
  return t;
}

PosteriorSamples run_chain(const SmoothModel& model, const ChainConfig& cfg) {
  cfg.validate();
  const int kept = (cfg.n_iterations - cfg.n_burnin) / cfg.thin;

  PosteriorSamples out;
  out.seed = cfg.seed;
  out.n_sites = model.n_sites();
  out.n_mesh_nodes = model.n_mesh_nodes();
  out.theta_draws.resize(kept, 7);
  out.latent_draws.resize(kept, model.latent_dim());

  Rng rng(cfg.seed);
  auto cur = std::make_unique<SmoothWorkspace>(model);
  auto prop = std::make_unique<SmoothWorkspace>(model);

  const HyperParameters theta0 = chain_start(model);
  Eigen::Array<double, 7, 1> z;
  {
    const auto a = theta0.as_array();
    for (int k = 0; k < 7; ++k) z[k] = std::log(a[k]);
  }
  auto theta_of = [](const Eigen::Array<double, 7, 1>& lz) {
    std::array<double, 7> a;
    for (int k = 0; k < 7; ++k) a[static_cast<std::size_t>(k)] = std::exp(lz[k]);
    return HyperParameters::from_array(a);
  };
  // target on the log scale includes the change-of-variables term sum(log theta)
  double lt = cur->log_marginal_hyper(theta0) + z.sum();
  if (!std::isfinite(lt)) throw numeric_error("chain start is infeasible");

  Eigen::Array<double, 7, 1> base;
  for (int k = 0; k < 7; ++k) base[k] = cfg.proposal_scales[static_cast<std::size_t>(k)];
  double global_scale = 1.0;
  long long accepted = 0;
  int window_accepted = 0, window_count = 0;

  int row = 0;
  for (int it = 0; it < cfg.n_iterations; ++it) {
    Eigen::Array<double, 7, 1> zp;
    for (int k = 0; k < 7; ++k) zp[k] = z[k] + global_scale * base[k] * rng.normal();
    const HyperParameters theta_p = theta_of(zp);
    const double ltp = prop->log_marginal_hyper(theta_p) + zp.sum();
    ++window_count;
    if (std::log(rng.uniform()) < ltp - lt) {
      z = zp;
      lt = ltp;
      std::swap(cur, prop);
      ++accepted;
      ++window_accepted;
    }
    if (cfg.adapt && it < cfg.n_burnin && window_count == 50) {
      const double rate = static_cast<double>(window_accepted) / window_count;
      global_scale *= std::exp(1.5 * (rate - 0.23));
      window_accepted = 0;
      window_count = 0;
    }
    const Eigen::VectorXd x = cur->draw_latent(rng);
    if (it >= cfg.n_burnin && (it - cfg.n_burnin) % cfg.thin == 0) {
      const HyperParameters th = theta_of(z);
      const auto a = th.as_array();
      for (int k = 0; k < 7; ++k) out.theta_draws(row, k) = a[static_cast<std::size_t>(k)];
      out.latent_draws.row(row) = x.transpose();
      ++row;
    }
  }
  out.acceptance_rate = static_cast<double>(accepted) / cfg.n_iterations;
  return out;
}

}  // namespace exlgm
