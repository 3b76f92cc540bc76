#include "exlgm/evt.hpp"

#include <cmath>
#include <limits>

#include "exlgm/errors.hpp"
#include "exlgm/priors.hpp"

namespace exlgm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kXiExact = 1e-12;   // below this, take the xi = 0 limit
constexpr double kXiSeries = 1e-8;   // below this, series for log1p(xi*w)/xi

void check_finite_params(const PPParameters& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || !std::isfinite(p.xi))
    throw invalid_input("non-finite GEV parameters");
  if (p.sigma <= 0.0) throw invalid_input("scale must be positive");
}
}  // namespace

void ExceedanceSet::validate() const {
  if (!std::isfinite(threshold) || !std::isfinite(n_block) || n_block <= 0.0)
    throw invalid_input("exceedance set: bad threshold or n_block");
  if (n_total <= 0) throw invalid_input("exceedance set: n_total must be positive");
  if (static_cast<std::int64_t>(exceedances.size()) > n_total)
    throw invalid_input("exceedance set: more exceedances than replicates");
  for (double y : exceedances) {
    if (!std::isfinite(y) || y <= threshold)
      throw invalid_input("exceedance set: values must be finite and above the threshold");
  }
}

double detail::log1p_over_xi(double w, double xi) {
  if (std::abs(xi) < kXiSeries) {
    // log(1+x)/xi = w - xi w^2/2 + xi^2 w^3/3 - ...; with |xi| < 1e-8 the
    // truncation error is far below double precision for moderate w.
    if (std::abs(xi) < kXiExact) return w;
    return w * (1.0 - xi * w / 2.0 + xi * xi * w * w / 3.0);
  }
  return std::log1p(xi * w) / xi;
}

double gev_cdf(double z, const PPParameters& p) {
  check_finite_params(p);
  if (!std::isfinite(z)) throw invalid_input("non-finite argument to gev_cdf");
  const double w = (z - p.mu) / p.sigma;
  const double t = 1.0 + p.xi * w;
  if (t <= 0.0) return p.xi > 0.0 ? 0.0 : 1.0;
  // (1 + xi w)^(-1/xi) = exp(-log1p(xi w)/xi), Gumbel limit exp(-w)
  return std::exp(-std::exp(-detail::log1p_over_xi(w, p.xi)));
}

double gev_return_level(double p_exc, const PPParameters& p) {
  check_finite_params(p);
  if (!(p_exc > 0.0 && p_exc < 1.0))
    throw invalid_input("exceedance probability must lie in (0, 1)");
  const double y = -std::log1p(-p_exc);  // -log(1 - p_exc)
  const double logy = std::log(y);
  if (std::abs(p.xi) < kXiExact) return p.mu - p.sigma * logy;
  // mu + sigma*(y^-xi - 1)/xi, with expm1 keeping the xi -> 0 limit smooth
  return p.mu + p.sigma * std::expm1(-p.xi * logy) / p.xi;
}

double gp_cdf(double y, double kappa_u, double xi) {
  if (!std::isfinite(y) || !std::isfinite(kappa_u) || !std::isfinite(xi))
    throw invalid_input("non-finite argument to gp_cdf");
  if (kappa_u <= 0.0) throw invalid_input("gp scale must be positive");
  if (y < 0.0) throw invalid_input("gp excess must be nonnegative");
  const double w = y / kappa_u;
  if (1.0 + xi * w <= 0.0) return 1.0;  // at/above the upper endpoint, xi < 0
  return -std::expm1(-detail::log1p_over_xi(w, xi));
}

double ppp_log_intensity(double y, const PPParameters& p) {
  check_finite_params(p);
  if (!std::isfinite(y)) throw invalid_input("non-finite argument to ppp_log_intensity");
  const double w = (y - p.mu) / p.sigma;
  const double t = 1.0 + p.xi * w;
  if (t <= 0.0) return -kInf;
  // log lambda = -log sigma - (1/xi + 1) log(1 + xi w)
  return -std::log(p.sigma) - detail::log1p_over_xi(w, p.xi) -
         (std::abs(p.xi) < kXiExact ? 0.0 : std::log1p(p.xi * w));
}

double ppp_log_likelihood(const ExceedanceSet& e, const PPParameters& p) {
  e.validate();
  check_finite_params(p);
  const double wu = (e.threshold - p.mu) / p.sigma;
  if (1.0 + p.xi * wu <= 0.0) return -kInf;
  double ll = -e.n_block * std::exp(-detail::log1p_over_xi(wu, p.xi));
  for (double y : e.exceedances) {
    const double li = ppp_log_intensity(y, p);
    if (li == -kInf) return -kInf;
    ll += li;
  }
  return ll;
}

double generalized_log_likelihood(const ExceedanceSet& e, const PPParameters& p) {
  const double lp = beta_shape_log_prior(p.xi);
  if (lp == -kInf) return -kInf;
  const double ll = ppp_log_likelihood(e, p);
  if (ll == -kInf) return -kInf;
  return ll + lp;
}

}  // namespace exlgm
