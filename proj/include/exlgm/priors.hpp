#pragma once

namespace exlgm {

/// Rates of the penalized-complexity priors and the intercept prior variance.
/// Rates are user-defined; defaults() encodes the weakly-informative
/// conventions P(sigma_nugget > 1) = 0.05, P(s > 2) = 0.05 and
/// P(rho < diameter/10) = 0.05.
struct PriorConfig {
  double lambda_sigma_psi;
  double lambda_sigma_tau;
  double lambda_sigma_phi;
  double lambda_s_psi;
  double lambda_rho_psi;
  double lambda_s_tau;
  double lambda_rho_tau;
  double sigma_beta_sq = 100.0 * 100.0;

  static PriorConfig defaults(double domain_diameter);
  void validate() const;
};

/// Log density at xi of the Beta(4,4) distribution shifted to (-0.5, 0.5);
/// -infinity outside.
double beta_shape_log_prior(double xi);

/// Log density of the shape prior pushed forward through the shape transform;
/// finite for every real phi.
double phi_log_prior(double phi);

/// Exponential PC prior for a nugget standard deviation: log(lambda) - lambda*sigma.
double pc_prior_nugget_log(double sigma, double lambda);

/// Joint PC prior for a Matern (marginal sd, range) pair:
/// log{ lambda_s lambda_rho rho^-2 exp(-lambda_s s - lambda_rho / rho) }.
double pc_prior_matern_log(double s, double rho, double lambda_s, double lambda_rho);

/// Rate lambda such that an Exponential(lambda) variable exceeds u0 with
/// probability alpha. Used for sd-type hyperparameters.
double calibrate_rate_from_tail(double u0, double alpha);

/// Rate lambda_rho such that the PC-prior range falls below rho0 with
/// probability alpha.
double calibrate_range_rate(double rho0, double alpha);

}  // namespace exlgm
