#include "exlgm/priors.hpp"

#include <cmath>
#include <limits>

#include "exlgm/errors.hpp"
#include "exlgm/link.hpp"

namespace exlgm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Beta(4,4) normalizer: 1/B(4,4) = Gamma(8)/(Gamma(4)Gamma(4)) = 140
const double kLog140 = std::log(140.0);

// log(1 - exp(-t)) for t > 0 without cancellation
double log1mexp(double t) {
  return t < 0.6931471805599453 ? std::log(-std::expm1(-t)) : std::log1p(-std::exp(-t));
}
}  // namespace

PriorConfig PriorConfig::defaults(double domain_diameter) {
  if (!(domain_diameter > 0.0)) throw invalid_input("prior defaults need a positive domain diameter");
  PriorConfig c;
  const double lam_sigma = calibrate_rate_from_tail(1.0, 0.05);
  c.lambda_sigma_psi = lam_sigma;
  c.lambda_sigma_tau = lam_sigma;
  c.lambda_sigma_phi = lam_sigma;
  const double lam_s = calibrate_rate_from_tail(2.0, 0.05);
  c.lambda_s_psi = lam_s;
  c.lambda_s_tau = lam_s;
  const double lam_rho = calibrate_range_rate(0.1 * domain_diameter, 0.05);
  c.lambda_rho_psi = lam_rho;
  c.lambda_rho_tau = lam_rho;
  return c;
}

void PriorConfig::validate() const {
  const double r[] = {lambda_sigma_psi, lambda_sigma_tau, lambda_sigma_phi,
                      lambda_s_psi,     lambda_rho_psi,   lambda_s_tau,
                      lambda_rho_tau,   sigma_beta_sq};
  for (double v : r)
    if (!std::isfinite(v) || v <= 0.0)
      throw invalid_input("prior rates and intercept variance must be positive");
}

double beta_shape_log_prior(double xi) {
  if (!std::isfinite(xi) || xi <= -0.5 || xi >= 0.5) return -kInf;
  // grouped so the result is exactly symmetric in xi
  return kLog140 + 3.0 * (std::log(xi + 0.5) + std::log(0.5 - xi));
}

double phi_log_prior(double phi) {
  if (!std::isfinite(phi)) throw invalid_input("phi_log_prior: non-finite argument");
  using namespace link_constants;
  const double z = (phi - a_phi) / b_phi;
  const double ez = std::exp(z);
  if (ez == kInf) return -kInf;  // log density below the double range anyway
  // x = (xi + 1/2) = (1 - exp(-e^z))^(1/c), all kept in logs
  const double log_x = log1mexp(ez) / c_phi;
  const double w = std::exp(-ez);
  // log(1 - x): for x near 1, 1 - x ~ w/c with a relative error of order w
  const double log_1mx =
      w < 1e-8 ? -ez - std::log(c_phi) : std::log(-std::expm1(log_x));
  return kLog140 - std::log(b_phi) - std::log(c_phi) + (4.0 - c_phi) * log_x +
         3.0 * log_1mx + z - ez;
}

double pc_prior_nugget_log(double sigma, double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) throw invalid_input("pc prior: rate must be positive");
  if (!std::isfinite(sigma) || sigma <= 0.0) return -kInf;
  return std::log(lambda) - lambda * sigma;
}

double pc_prior_matern_log(double s, double rho, double lambda_s, double lambda_rho) {
  if (!std::isfinite(lambda_s) || lambda_s <= 0.0 || !std::isfinite(lambda_rho) || lambda_rho <= 0.0)
    throw invalid_input("pc prior: rates must be positive");
  if (!std::isfinite(s) || s <= 0.0 || !std::isfinite(rho) || rho <= 0.0) return -kInf;
  return std::log(lambda_s) + std::log(lambda_rho) - 2.0 * std::log(rho) -
         lambda_s * s - lambda_rho / rho;
}

double calibrate_rate_from_tail(double u0, double alpha) {
  if (!std::isfinite(u0) || u0 <= 0.0 || !(alpha > 0.0 && alpha < 1.0))
    throw invalid_input("calibrate_rate_from_tail: need u0 > 0 and alpha in (0, 1)");
  return -std::log(alpha) / u0;
}

double calibrate_range_rate(double rho0, double alpha) {
  if (!std::isfinite(rho0) || rho0 <= 0.0 || !(alpha > 0.0 && alpha < 1.0))
    throw invalid_input("calibrate_range_rate: need rho0 > 0 and alpha in (0, 1)");
  return -std::log(alpha) * rho0;
}

}  // namespace exlgm
