#pragma once

#include <array>

#include "exlgm/errors.hpp"

namespace exlgm {

/// theta = (sigma_psi, s_psi, rho_psi, sigma_tau, s_tau, rho_tau, sigma_phi):
/// nugget standard deviations, Matern marginal standard deviations and ranges.
struct HyperParameters {
  double sigma_psi;
  double s_psi;
  double rho_psi;
  double sigma_tau;
  double s_tau;
  double rho_tau;
  double sigma_phi;

  static constexpr int size = 7;
  static constexpr std::array<const char*, 7> names = {
      "sigma_psi", "s_psi", "rho_psi", "sigma_tau", "s_tau", "rho_tau", "sigma_phi"};

  std::array<double, 7> as_array() const {
    return {sigma_psi, s_psi, rho_psi, sigma_tau, s_tau, rho_tau, sigma_phi};
  }
  static HyperParameters from_array(const std::array<double, 7>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }

  void validate() const {
    for (double v : as_array())
      if (!(v > 0.0)) throw invalid_input("hyperparameters must be strictly positive");
  }
};

}  // namespace exlgm
