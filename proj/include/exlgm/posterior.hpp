#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "exlgm/link.hpp"
#include "exlgm/rng.hpp"
#include "exlgm/smoother.hpp"

namespace exlgm {

struct ReturnLevelRow {
  std::int64_t site_id;
  double lon;
  double lat;
  double return_period;
  double mean;
  double sd;
  double q025;
  double q975;
};

/// Per-site (psi, tau, phi) of one kept draw, read from the latent draw
/// matrix (columns: psi block, tau block, phi block, then nu).
TransformedParameters latent_site_params(const PosteriorSamples& samples, int draw, int site);

/// M-year return level summaries: per draw and site, map the latent
/// parameters through the inverse link and evaluate the GEV quantile at
/// exceedance probability 1/M; summarize across draws. Requires M > 1.
std::vector<ReturnLevelRow> return_level_surface(const PosteriorSamples& samples,
                                                 const std::vector<SiteFit>& fits, double M);

struct PredictConfig {
  double block_size = 365.25;
  int n_draws = 1000;  ///< predictive draws per posterior draw cycle
};

/// Draws from the posterior predictive distribution of a new value above the
/// site's threshold: cycling over posterior draws, Y | Y > u under
/// Y ~ G^{1/B} at that draw's parameters, by inverse transform. All outputs
/// exceed the threshold. Throws degenerate_site when the threshold sits at or
/// above the upper endpoint for essentially all draws.
std::vector<double> posterior_predictive_draws(const PosteriorSamples& samples, int site_index,
                                               double threshold, const PredictConfig& cfg,
                                               Rng& rng);

struct VariogramBin {
  double center;
  double semivariance;  ///< NaN when the bin is empty
  std::int64_t pair_count;
};

/// Classical Matheron estimator: per distance bin, half the mean squared
/// difference over site pairs. max_dist <= 0 selects half the domain
/// diameter.
std::vector<VariogramBin> empirical_variogram(const std::vector<double>& values,
                                              const std::vector<Eigen::Vector2d>& coords,
                                              int n_bins, double max_dist = 0.0);

}  // namespace exlgm
