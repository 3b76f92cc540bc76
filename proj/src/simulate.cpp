#include "exlgm/simulate.hpp"

#include <cmath>

#include "exlgm/errors.hpp"
#include "exlgm/gmrf.hpp"
#include "exlgm/link.hpp"
#include "exlgm/rng.hpp"

namespace exlgm {

namespace {

// one draw from G^{1/B}: y = G^{-1}(U^B), clamped at zero
double draw_daily(const PPParameters& p, double B, Rng& rng) {
  const double u = rng.uniform();
  const double p_exc = -std::expm1(B * std::log(u));  // 1 - U^B
  if (p_exc >= 1.0) return 0.0;                       // deep lower tail
  return std::max(0.0, gev_return_level(p_exc, p));
}

}  // namespace

Dataset simulate_fixed(const std::vector<SiteTruth>& truth, std::int64_t T, double B,
                       std::uint64_t seed) {
  if (truth.empty()) throw invalid_input("simulate: no sites");
  if (T < 1) throw invalid_input("simulate: T must be at least 1");
  if (!(B > 0.0)) throw invalid_input("simulate: block size must be positive");
  for (const auto& s : truth) {
    if (!(s.params.sigma > 0.0) || !std::isfinite(s.params.mu) || !std::isfinite(s.params.xi))
      throw invalid_input("simulate: invalid parameters for site " + std::to_string(s.site_id));
  }
  Dataset d;
  d.values.resize(static_cast<Eigen::Index>(truth.size()), static_cast<Eigen::Index>(T));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    d.sites.push_back({truth[i].site_id, truth[i].lon, truth[i].lat});
    Rng rng = Rng::substream(seed, i + 1);
    for (std::int64_t t = 0; t < T; ++t)
      d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
          draw_daily(truth[i].params, B, rng);
  }
  d.validate();
  return d;
}

GenerativeResult simulate_generative(const std::vector<Dataset::Site>& sites,
                                     const LatticeMesh& mesh, const GenerativeTruth& truth,
                                     std::int64_t T, double B, std::uint64_t seed) {
  if (sites.empty()) throw invalid_input("simulate: no sites");
  truth.theta.validate();
  const auto& th = truth.theta;

  std::vector<Eigen::Vector2d> coords;
  coords.reserve(sites.size());
  for (const auto& s : sites) coords.emplace_back(s.lon, s.lat);
  const Eigen::SparseMatrix<double> A = build_projection(mesh, coords);

  const SparseMatrixd Q_psi = build_precision(mesh, th.rho_psi);
  const SparseMatrixd Q_tau = build_precision(mesh, th.rho_tau);

  Rng latent_rng = Rng::substream(seed, 0);
  GenerativeResult out;
  out.u_psi = gmrf_sample(Q_psi, th.s_psi, latent_rng);
  out.u_tau = gmrf_sample(Q_tau, th.s_tau, latent_rng);

  const Eigen::Index N = static_cast<Eigen::Index>(sites.size());
  const Eigen::VectorXd proj_psi = A * out.u_psi;
  const Eigen::VectorXd proj_tau = A * out.u_tau;

  std::vector<SiteTruth> site_truth;
  site_truth.reserve(sites.size());
  for (Eigen::Index i = 0; i < N; ++i) {
    TransformedParameters eta;
    eta.psi = truth.beta_psi + proj_psi[i] + th.sigma_psi * latent_rng.normal();
    eta.tau = truth.beta_tau + proj_tau[i] + th.sigma_tau * latent_rng.normal();
    eta.phi = truth.beta_phi + th.sigma_phi * latent_rng.normal();
    site_truth.push_back({sites[static_cast<std::size_t>(i)].site_id,
                          sites[static_cast<std::size_t>(i)].lon,
                          sites[static_cast<std::size_t>(i)].lat, link_inverse(eta)});
  }
  out.data = simulate_fixed(site_truth, T, B, seed);
  out.site_truth = std::move(site_truth);
  return out;
}

}  // namespace exlgm
