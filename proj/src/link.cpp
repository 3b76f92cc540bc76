#include "exlgm/link.hpp"

#include <algorithm>
#include <cmath>

#include "exlgm/errors.hpp"

namespace exlgm {

using namespace link_constants;

double shape_transform(double xi) {
  if (!std::isfinite(xi) || xi <= -0.5 || xi >= 0.5)
    throw invalid_input("shape_transform: xi must lie in (-0.5, 0.5)");
  // u = (xi + 0.5)^c and 1 - u, both via log1p/expm1 so the boundaries stay sharp
  const double u = std::exp(c_phi * std::log1p(xi - 0.5));
  const double neg_log_one_minus_u = -std::log1p(-u);
  return a_phi + b_phi * std::log(neg_log_one_minus_u);
}

double shape_transform_inverse(double phi) {
  if (!std::isfinite(phi)) throw invalid_input("shape_transform_inverse: non-finite argument");
  const double z = (phi - a_phi) / b_phi;
  const double t = std::exp(z);
  // x = (1 - exp(-t))^(1/c); -expm1 keeps x > 0 when t underflows
  const double x = std::pow(-std::expm1(-t), 1.0 / c_phi);
  const double xi = x - 0.5;
  const double lo = std::nextafter(-0.5, 0.0);
  const double hi = std::nextafter(0.5, 0.0);
  return std::clamp(xi, lo, hi);
}

TransformedParameters link_forward(const PPParameters& p) {
  if (!std::isfinite(p.mu) || p.mu <= 0.0) throw invalid_input("link_forward: mu must be positive");
  if (!std::isfinite(p.sigma) || p.sigma <= 0.0)
    throw invalid_input("link_forward: sigma must be positive");
  return {std::log(p.mu), std::log(p.sigma / p.mu), shape_transform(p.xi)};
}

PPParameters link_inverse(const TransformedParameters& t) {
  if (!std::isfinite(t.psi) || !std::isfinite(t.tau) || !std::isfinite(t.phi))
    throw invalid_input("link_inverse: non-finite argument");
  return {std::exp(t.psi), std::exp(t.psi + t.tau), shape_transform_inverse(t.phi)};
}

}  // namespace exlgm
