#pragma once

#include <cstdint>
#include <vector>

namespace exlgm {

/// Location/scale/shape triple of the point-process (equivalently GEV)
/// parametrization. Raw distribution functions accept any real shape;
/// the generalized likelihood restricts it to (-0.5, 0.5) through the
/// shape prior.
struct PPParameters {
  double mu;     ///< location, data units
  double sigma;  ///< scale, data units, > 0
  double xi;     ///< shape, dimensionless
};

/// Threshold exceedances of one site, together with the bookkeeping the
/// point-process likelihood needs.
struct ExceedanceSet {
  double threshold = 0.0;
  std::vector<double> exceedances;  ///< each strictly greater than threshold
  std::int64_t n_total = 0;         ///< total replicates at the site
  double n_block = 1.0;             ///< intensity rescaling (e.g. years of data)

  /// Throws invalid_input when an invariant is broken.
  void validate() const;
};

/// GEV distribution function G(z). Uses the Gumbel branch for |xi| below the
/// switching tolerance, returns 0 below the lower endpoint (xi > 0) and 1
/// above the upper endpoint (xi < 0).
double gev_cdf(double z, const PPParameters& p);

/// Quantile G^{-1}(1 - p_exc) for an exceedance probability p_exc in (0, 1).
/// The M-year return level is obtained with p_exc = 1/M.
double gev_return_level(double p_exc, const PPParameters& p);

/// Generalized Pareto distribution function H(y) for excesses y >= 0 with
/// threshold-dependent scale kappa_u > 0.
double gp_cdf(double y, double kappa_u, double xi);

/// Log intensity of the limiting Poisson process at level y. The intensity is
/// time homogeneous, so no time coordinate is taken. Returns -infinity when y
/// lies outside the support.
double ppp_log_intensity(double y, const PPParameters& p);

/// Point-process log likelihood of a set of threshold exceedances. Returns
/// -infinity when the threshold or any exceedance is outside the support.
double ppp_log_likelihood(const ExceedanceSet& e, const PPParameters& p);

/// ppp_log_likelihood plus the log of the shifted Beta(4,4) density at the
/// shape; -infinity when xi is outside (-0.5, 0.5).
double generalized_log_likelihood(const ExceedanceSet& e, const PPParameters& p);

namespace detail {
/// log(1 + xi*w)/xi evaluated stably through the removable singularity at
/// xi = 0 (series below |xi| = 1e-8, exact limit below 1e-12). Requires
/// 1 + xi*w > 0.
double log1p_over_xi(double w, double xi);
}  // namespace detail

}  // namespace exlgm
