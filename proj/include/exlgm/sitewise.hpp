#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "exlgm/data.hpp"
#include "exlgm/evt.hpp"
#include "exlgm/link.hpp"

namespace exlgm {

/// One site's replicates plus coordinates.
struct SiteSeries {
  std::int64_t site_id = 0;
  double lon = 0.0;
  double lat = 0.0;
  std::vector<double> values;
};

struct FitOptions {
  double threshold_quantile = 0.75;  ///< quantile of the strictly positive values
  double n_block = 1.0;              ///< point-process intensity rescaling
  int min_exceedances = 15;
};

/// Sitewise estimate in transformed coordinates with its observed
/// information (negative Hessian of the generalized log likelihood at the
/// optimum, in (psi, tau, phi)).
struct SiteFit {
  std::int64_t site_id = 0;
  double lon = 0.0;
  double lat = 0.0;
  TransformedParameters eta_hat{};
  Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
  int n_exceedances = 0;
  double threshold = 0.0;
  bool hessian_repaired = false;  ///< eigenvalue flooring was needed
};

/// Empirical quantile (type 7) of the strictly positive values; zeros are
/// excluded. Throws degenerate_site when no positive value exists.
double select_threshold(std::span<const double> values, double q);

/// Extracts the exceedance set of a series at the configured threshold
/// quantile. Throws too_few_exceedances below the configured minimum.
ExceedanceSet extract_exceedances(const SiteSeries& series, const FitOptions& opts);

/// Maximizes the generalized log likelihood over (psi, tau, phi) by BFGS from
/// moment-based starting values, with jittered restarts on failure, and
/// extracts the observed information by central finite differences
/// (relative step 1e-4, symmetrized, eigenvalue-floored when needed).
SiteFit fit_site(const SiteSeries& series, const FitOptions& opts);

struct SiteExclusion {
  std::int64_t site_id;
  std::string reason;
};

struct FitReport {
  std::vector<SiteFit> fits;              ///< dataset order, excluded sites removed
  std::vector<SiteExclusion> exclusions;
};

/// Fits every site independently, in parallel across sites (n_threads = 0
/// picks the hardware count). The result is keyed by dataset order and does
/// not depend on scheduling. Throws only if every site fails.
FitReport fit_all_sites(const Dataset& data, const FitOptions& opts, int n_threads = 0);

/// Sup distance per transformed coordinate between the normalized generalized
/// likelihood profile (others held at the optimum) and the matching slice of
/// the Gaussian approximation, over +-grid_halfwidth standard errors.
/// Diagnostic only.
struct ApproxQuality {
  std::array<double, 3> sup_distance;  ///< psi, tau, phi
};
ApproxQuality gaussian_likelihood_check(const SiteSeries& series, const SiteFit& fit,
                                        const FitOptions& opts, double grid_halfwidth);

/// Generic form of the check for an arbitrary 3-parameter negative log
/// likelihood; exact Gaussian objectives give sup distance zero.
ApproxQuality gaussian_profile_distance(
    const std::function<double(const Eigen::VectorXd&)>& neg_loglik,
    const Eigen::Vector3d& eta_hat, const Eigen::Matrix3d& info, double grid_halfwidth);

}  // namespace exlgm
