#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "exlgm/gmrf.hpp"
#include "exlgm/hyperparameters.hpp"
#include "exlgm/mesh.hpp"
#include "exlgm/priors.hpp"
#include "exlgm/rng.hpp"
#include "exlgm/sitewise.hpp"

namespace exlgm {

struct ChainConfig {
  int n_iterations = 10000;
  int n_burnin = 2000;
  int thin = 1;
  std::uint64_t seed = 0;
  std::array<double, 7> proposal_scales = {0.15, 0.15, 0.15, 0.15, 0.15, 0.15, 0.15};
  bool adapt = true;

  void validate() const;
};

struct PosteriorSamples {
  Eigen::MatrixXd theta_draws;   ///< kept iterations x 7, columns as HyperParameters::names
  Eigen::MatrixXd latent_draws;  ///< kept iterations x (3N + 3 + 2|mesh|)
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;
  int n_sites = 0;
  int n_mesh_nodes = 0;

  int n_kept() const { return static_cast<int>(theta_draws.rows()); }
};

/// Design matrix of the latent linear model, 3N x (3 + 2 m):
/// [1 A . . .; . . 1 A .; . . . . 1] with A the N x m projection.
SparseMatrixd assemble_design(int n_sites, const SparseMatrixd& A);

/// Mean and precision of the Gaussian full conditional of the stacked latent
/// vector x = (eta, nu).
struct FullConditional {
  Eigen::VectorXd mean;
  SparseMatrixd precision;
};

/// The Gaussian-Gaussian pseudo model: sitewise estimates eta_hat observed
/// with known precision Q_data, a latent linear model eta = Z nu + eps, and
/// PC/normal priors. Immutable once built; chains create their own
/// factorization workspaces from it.
class SmoothModel {
 public:
  SmoothModel(Eigen::VectorXd eta_hat, SparseMatrixd q_data, const LatticeMesh& mesh,
              SparseMatrixd projection, PriorConfig prior);

  /// Builds the model from sitewise fits (stacking order psi..., tau..., phi...).
  static SmoothModel from_fits(const std::vector<SiteFit>& fits, const LatticeMesh& mesh,
                               PriorConfig prior);

  int n_sites() const { return n_; }
  int n_mesh_nodes() const { return m_; }
  int latent_dim() const { return 3 * n_ + 3 + 2 * m_; }
  const LatticeMesh& mesh() const { return mesh_; }
  const SparseMatrixd& design() const { return Z_; }
  const Eigen::VectorXd& eta_hat() const { return eta_hat_; }
  const SparseMatrixd& q_data() const { return q_data_; }
  const PriorConfig& prior() const { return prior_; }

  /// Posterior precision of x = (eta, nu) at theta; the pattern does not
  /// depend on theta.
  SparseMatrixd posterior_precision(const HyperParameters& theta) const;
  /// Same, with the two range precisions already built (saves rebuilding them
  /// when the caller also needs their factorizations).
  SparseMatrixd posterior_precision(const HyperParameters& theta,
                                    const SparseMatrixd& Q_rho_psi,
                                    const SparseMatrixd& Q_rho_tau) const;
  /// Right-hand side (Q_data eta_hat; 0) of the mean system.
  const Eigen::VectorXd& rhs() const { return rhs_; }

  double log_hyper_prior(const HyperParameters& theta) const;

 private:
  int n_ = 0;
  int m_ = 0;
  LatticeMesh mesh_;
  SparseMatrixd A_;
  SparseMatrixd Z_;
  Eigen::VectorXd eta_hat_;
  SparseMatrixd q_data_;
  double log_det_q_data_ = 0.0;
  Eigen::VectorXd rhs_;
  PriorConfig prior_;

  friend class SmoothWorkspace;
};

/// Per-chain mutable state: pattern-analyzed factorizations reused across
/// iterations. Not thread-safe; one instance per chain.
class SmoothWorkspace {
 public:
  explicit SmoothWorkspace(const SmoothModel& model);

  /// Factorizes the full conditional of x = (eta, nu) at theta and returns
  /// its mean; the factor stays loaded for draws. Throws
  /// not_positive_definite at infeasible theta.
  const Eigen::VectorXd& refresh(const HyperParameters& theta);

  /// Exact draw from the loaded full conditional.
  Eigen::VectorXd draw_latent(Rng& rng);

  /// log pi(theta) + log pi(eta_hat | theta), the marginal MH target, up to a
  /// constant. Computed with the Gaussian identity
  ///   log pi(eta_hat | theta) = log pi(x*) + log pi(eta_hat | x*) - log pi(x* | eta_hat)
  /// at x* = the conditional mean (any x* gives the same value; an override
  /// is accepted for verification). Returns -infinity at infeasible theta.
  double log_marginal_hyper(const HyperParameters& theta,
                            const std::optional<Eigen::VectorXd>& x_star = std::nullopt);

  const SmoothModel& model() const { return model_; }

 private:
  const SmoothModel& model_;
  SparseChol chol_post_;
  SparseChol chol_rho_psi_;
  SparseChol chol_rho_tau_;
  Eigen::VectorXd mean_;
  bool loaded_ = false;
};

/// Convenience wrappers matching the operation contracts.
FullConditional latent_full_conditional(const SmoothModel& model, const HyperParameters& theta);
Eigen::VectorXd gibbs_draw_latent(const SmoothModel& model, const HyperParameters& theta, Rng& rng);
double log_marginal_hyper(const SmoothModel& model, const HyperParameters& theta,
                          const std::optional<Eigen::VectorXd>& x_star = std::nullopt);

/// Marginal Metropolis-Hastings on log theta (joint Gaussian random walk,
/// global scale adapted toward 23% acceptance during burn-in) alternating
/// with a Gibbs draw of the latent vector. Reproducible per seed.
PosteriorSamples run_chain(const SmoothModel& model, const ChainConfig& cfg);

/// Data-driven starting value for theta: nugget sds from the sitewise
/// standard errors, sills from the spread of the estimates, ranges from the
/// domain diameter.
HyperParameters chain_start(const SmoothModel& model);

}  // namespace exlgm
