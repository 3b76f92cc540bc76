#pragma once

#include "exlgm/evt.hpp"

namespace exlgm {

/// Parameters mapped to unconstrained latent coordinates:
/// psi = log(mu), tau = log(sigma/mu), phi = shape_transform(xi).
struct TransformedParameters {
  double psi;
  double tau;
  double phi;
};

/// Fixed constants of the shape transform. The published rounded values are
/// used verbatim so results match the established parametrization; they are
/// self-consistent to about 1e-5.
namespace link_constants {
inline constexpr double c_phi = 0.8;
inline constexpr double b_phi = 0.39563;
inline constexpr double a_phi = 0.062376;
}  // namespace link_constants

/// Monotone map (-0.5, 0.5) -> R for the shape parameter,
/// phi = a + b*log(-log(1 - (xi + 0.5)^c)). Approximately the identity near 0.
double shape_transform(double xi);

/// Inverse of shape_transform. The result is clamped into the open interval
/// (-0.5, 0.5) at double resolution, so the round trip stays inside the
/// domain even for arguments far in the tails.
double shape_transform_inverse(double phi);

/// (mu, sigma, xi) -> (log mu, log(sigma/mu), shape_transform(xi)).
/// Requires mu > 0, sigma > 0, xi in (-0.5, 0.5).
TransformedParameters link_forward(const PPParameters& p);

/// Inverse of link_forward: (exp psi, exp(psi + tau), shape_transform_inverse(phi)).
PPParameters link_inverse(const TransformedParameters& t);

}  // namespace exlgm
