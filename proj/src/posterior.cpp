#include "exlgm/posterior.hpp"

#include <cmath>
#include <limits>

#include "exlgm/errors.hpp"
#include "exlgm/evt.hpp"
#include "exlgm/stats.hpp"

namespace exlgm {

TransformedParameters latent_site_params(const PosteriorSamples& samples, int draw, int site) {
  const int N = samples.n_sites;
  if (site < 0 || site >= N) throw invalid_input("site index out of range");
  if (draw < 0 || draw >= samples.n_kept()) throw invalid_input("draw index out of range");
  return {samples.latent_draws(draw, site), samples.latent_draws(draw, N + site),
          samples.latent_draws(draw, 2 * N + site)};
}

std::vector<ReturnLevelRow> return_level_surface(const PosteriorSamples& samples,
                                                 const std::vector<SiteFit>& fits, double M) {
  if (!(M > 1.0)) throw invalid_input("return period must exceed 1");
  if (static_cast<int>(fits.size()) != samples.n_sites)
    throw invalid_input("return_level_surface: fits/samples site count mismatch");
  const int n_draws = samples.n_kept();
  if (n_draws < 1) throw invalid_input("no posterior draws");

  std::vector<ReturnLevelRow> rows;
  rows.reserve(fits.size());
  std::vector<double> z(static_cast<std::size_t>(n_draws));
  for (int i = 0; i < samples.n_sites; ++i) {
    for (int r = 0; r < n_draws; ++r) {
      const PPParameters p = link_inverse(latent_site_params(samples, r, i));
      z[static_cast<std::size_t>(r)] = gev_return_level(1.0 / M, p);
    }
    ReturnLevelRow row;
    row.site_id = fits[static_cast<std::size_t>(i)].site_id;
    row.lon = fits[static_cast<std::size_t>(i)].lon;
    row.lat = fits[static_cast<std::size_t>(i)].lat;
    row.return_period = M;
    row.mean = mean(z);
    row.sd = n_draws > 1 ? sample_sd(z) : 0.0;
    row.q025 = quantile_type7(z, 0.025);
    row.q975 = quantile_type7(z, 0.975);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> posterior_predictive_draws(const PosteriorSamples& samples, int site_index,
                                               double threshold, const PredictConfig& cfg,
                                               Rng& rng) {
  if (cfg.n_draws < 1) throw invalid_input("predictive draws: n_draws must be positive");
  if (!(cfg.block_size > 0.0)) throw invalid_input("predictive draws: block size must be positive");
  if (!std::isfinite(threshold)) throw invalid_input("predictive draws: non-finite threshold");
  const int n_kept = samples.n_kept();
  if (n_kept < 1) throw invalid_input("no posterior draws");

  const double B = cfg.block_size;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cfg.n_draws));
  long long attempts = 0;
  const long long max_attempts = 10LL * cfg.n_draws;
  int cycle = 0;
  while (static_cast<int>(out.size()) < cfg.n_draws) {
    if (++attempts > max_attempts)
      throw degenerate_site("threshold at or above the upper endpoint for the posterior draws");
    const PPParameters p = link_inverse(latent_site_params(samples, cycle, site_index));
    cycle = (cycle + 1) % n_kept;
    const double Gu = gev_cdf(threshold, p);
    const double Fu = std::pow(Gu, 1.0 / B);
    if (Fu >= 1.0) continue;  // upper endpoint at or below u for this draw
    // q ~ Uniform(F(u), 1), y = G^{-1}(q^B); work with t = -log(q^B) so the
    // deep tail q^B -> 0 stays representable
    double q = Fu + rng.uniform() * (1.0 - Fu);
    if (q >= 1.0) q = std::nextafter(1.0, 0.0);
    const double t = -B * std::log(q);
    const double logt = std::log(t);
    double y;
    if (std::abs(p.xi) < 1e-12)
      y = p.mu - p.sigma * logt;
    else
      y = p.mu + p.sigma * std::expm1(-p.xi * logt) / p.xi;
    if (!(y > threshold)) y = std::nextafter(threshold, std::numeric_limits<double>::infinity());
    out.push_back(y);
  }
  return out;
}

std::vector<VariogramBin> empirical_variogram(const std::vector<double>& values,
                                              const std::vector<Eigen::Vector2d>& coords,
                                              int n_bins, double max_dist) {
  if (values.size() != coords.size()) throw invalid_input("variogram: values/coords mismatch");
  if (values.size() < 2) throw invalid_input("variogram needs at least two sites");
  if (n_bins < 1) throw invalid_input("variogram needs at least one bin");

  const std::size_t n = values.size();
  if (max_dist <= 0.0) {
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        dmax = std::max(dmax, (coords[i] - coords[j]).norm());
    max_dist = 0.5 * dmax;
    if (!(max_dist > 0.0)) throw invalid_input("variogram: all sites coincide");
  }
  const double width = max_dist / n_bins;
  std::vector<double> sum_sq(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<std::int64_t> count(static_cast<std::size_t>(n_bins), 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (coords[i] - coords[j]).norm();
      if (d > max_dist) continue;
      const auto b = std::min<std::size_t>(static_cast<std::size_t>(d / width),
                                           static_cast<std::size_t>(n_bins - 1));
      const double diff = values[i] - values[j];
      sum_sq[b] += diff * diff;
      ++count[b];
    }
  std::vector<VariogramBin> bins;
  bins.reserve(static_cast<std::size_t>(n_bins));
  for (int b = 0; b < n_bins; ++b) {
    VariogramBin vb;
    vb.center = (b + 0.5) * width;
    vb.pair_count = count[static_cast<std::size_t>(b)];
    vb.semivariance = vb.pair_count > 0
                          ? sum_sq[static_cast<std::size_t>(b)] / (2.0 * vb.pair_count)
                          : std::numeric_limits<double>::quiet_NaN();
    bins.push_back(vb);
  }
  return bins;
}

}  // namespace exlgm
