// Simulation-backed checks that take seconds rather than milliseconds.
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "exlgm/evt.hpp"
#include "exlgm/optimize.hpp"
#include "exlgm/posterior.hpp"
#include "exlgm/simulate.hpp"
#include "exlgm/sitewise.hpp"
#include "exlgm/smoother.hpp"
#include "support.hpp"

using namespace exlgm;

TEST_CASE("block maxima of the daily simulator follow the target gev") {
  // T iid draws from G^{1/B} grouped into blocks of B have maxima ~ G
  std::vector<SiteTruth> truth{{1, 0.0, 0.0, {0.0, 1.0, 0.0}}};
  const double B = 365.25;
  const std::int64_t T = 365250;
  const Dataset d = simulate_fixed(truth, T, B, 404);
  std::vector<double> maxima;
  std::int64_t b = 0;
  while (true) {
    const auto lo = static_cast<std::int64_t>(std::floor(b * B));
    const auto hi = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor((b + 1) * B)), T);
    if (lo >= T) break;
    double m = 0.0;
    for (std::int64_t t = lo; t < hi; ++t) m = std::max(m, d.values(0, t));
    maxima.push_back(m);
    ++b;
  }
  CHECK(maxima.size() == 1000);
  const double p = test_support::ks_test_pvalue(
      maxima, [](double z) { return gev_cdf(z, {0.0, 1.0, 0.0}); });
  CHECK(p > 0.01);
}

TEST_CASE("point process fit recovers the simulator truth") {
  // maximizer of the raw likelihood lands within 3 mc standard errors
  std::vector<SiteTruth> truth{{1, 0.0, 0.0, {10.0, 5.0, 0.1}}};
  const Dataset d = simulate_fixed(truth, 10000, 365.25, 909);
  SiteSeries s;
  s.site_id = 1;
  s.values.assign(d.values.row(0).begin(), d.values.row(0).end());
  FitOptions opts;
  opts.n_block = 10000.0 / 365.25;
  const SiteFit fit = fit_site(s, opts);
  const PPParameters hat = link_inverse(fit.eta_hat);
  const Eigen::Matrix3d cov = fit.info.inverse();
  const TransformedParameters t0 = link_forward({10.0, 5.0, 0.1});
  CHECK(std::abs(fit.eta_hat.psi - t0.psi) < 3.0 * std::sqrt(cov(0, 0)));
  CHECK(std::abs(fit.eta_hat.tau - t0.tau) < 3.0 * std::sqrt(cov(1, 1)));
  CHECK(std::abs(fit.eta_hat.phi - t0.phi) < 3.0 * std::sqrt(cov(2, 2)));
  CHECK(hat.mu == doctest::Approx(10.0).epsilon(0.15));
  CHECK(hat.sigma == doctest::Approx(5.0).epsilon(0.25));
}

TEST_CASE("shape penalty pulls the estimate toward zero") {
  // paired fits on the same data: penalized |phi| never exceeds raw |phi|
  // when the prior score opposes the raw estimate
  int checked = 0;
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u, 6u}) {
    std::vector<SiteTruth> truth{{1, 0.0, 0.0, {10.0, 5.0, 0.15}}};
    const Dataset d = simulate_fixed(truth, 6000, 365.25, seed);
    SiteSeries s;
    s.site_id = 1;
    s.values.assign(d.values.row(0).begin(), d.values.row(0).end());
    FitOptions opts;
    opts.n_block = 6000.0 / 365.25;

    ExceedanceSet e = extract_exceedances(s, opts);
    auto objective = [&e](bool penalized) {
      return [&e, penalized](const Eigen::VectorXd& x) {
        if (std::abs(x[0]) > 700.0 || std::abs(x[0] + x[1]) > 700.0)
          return std::numeric_limits<double>::infinity();
        const PPParameters p = link_inverse({x[0], x[1], x[2]});
        const double ll =
            penalized ? generalized_log_likelihood(e, p) : ppp_log_likelihood(e, p);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
      };
    };
    const SiteFit fit = fit_site(s, opts);
    Eigen::VectorXd x0(3);
    x0 << fit.eta_hat.psi, fit.eta_hat.tau, fit.eta_hat.phi;
    const OptimResult raw = minimize_bfgs(objective(false), x0);
    const OptimResult gen = minimize_bfgs(objective(true), x0);
    if (!raw.converged || !gen.converged) continue;
    const double xi_raw = link_inverse({raw.x[0], raw.x[1], raw.x[2]}).xi;
    const double xi_gen = link_inverse({gen.x[0], gen.x[1], gen.x[2]}).xi;
    // prior score at xi: 3/(xi+0.5) - 3/(0.5-xi); opposes positive xi
    if (xi_raw > 0.0) {
      CHECK(std::abs(xi_gen) <= std::abs(xi_raw) + 1e-10);
      ++checked;
    }
  }
  CHECK(checked >= 3);
}

TEST_CASE("gaussian approximation improves with the exceedance count") {
  FitOptions opts;
  std::array<double, 3> sup_few{}, sup_many{};
  {
    std::vector<SiteTruth> truth{{1, 0.0, 0.0, {10.0, 5.0, 0.1}}};
    const Dataset d = simulate_fixed(truth, 2600, 365.25, 13);
    SiteSeries s;
    s.site_id = 1;
    s.values.assign(d.values.row(0).begin(), d.values.row(0).end());
    opts.n_block = 2600.0 / 365.25;
    opts.min_exceedances = 10;
    const SiteFit fit = fit_site(s, opts);
    CHECK(fit.n_exceedances >= 10);
    CHECK(fit.n_exceedances <= 30);
    sup_few = gaussian_likelihood_check(s, fit, opts, 3.0).sup_distance;
  }
  {
    std::vector<SiteTruth> truth{{1, 0.0, 0.0, {10.0, 5.0, 0.1}}};
    const Dataset d = simulate_fixed(truth, 100000, 365.25, 13);
    SiteSeries s;
    s.site_id = 1;
    s.values.assign(d.values.row(0).begin(), d.values.row(0).end());
    opts.n_block = 100000.0 / 365.25;
    const SiteFit fit = fit_site(s, opts);
    CHECK(fit.n_exceedances >= 500);
    sup_many = gaussian_likelihood_check(s, fit, opts, 3.0).sup_distance;
  }
  for (int j = 0; j < 3; ++j) CHECK(sup_many[j] < sup_few[j]);
}

TEST_CASE("variogram of a generative simulation approaches the analytic sill") {
  // psi field: far-distance semivariance near s^2 + sigma^2 (mesh projection
  // attenuates the sill a little; average over seeds to tame noise)
  GenerativeTruth truth;
  truth.theta = {0.05, 0.6, 8.0, 0.003, 0.4, 8.0, 0.06};
  truth.beta_psi = 2.2;
  truth.beta_tau = -1.1;
  truth.beta_phi = 0.097;
  std::vector<Dataset::Site> sites;
  std::int64_t id = 0;
  for (int j = 0; j < 15; ++j)
    for (int i = 0; i < 15; ++i) sites.push_back({id++, double(i), double(j)});
  const LatticeMesh mesh = build_mesh({0, 0, 14, 14}, 2.0, 4.0);

  std::vector<Eigen::Vector2d> coords;
  for (const auto& s : sites) coords.emplace_back(s.lon, s.lat);

  double sill_acc = 0.0;
  const int reps = 5;
  for (int r = 0; r < reps; ++r) {
    const GenerativeResult g =
        simulate_generative(sites, mesh, truth, 1, 365.25, 1000 + static_cast<unsigned>(r));
    std::vector<double> psi;
    for (const auto& st : g.site_truth) psi.push_back(std::log(st.params.mu));
    const auto bins = empirical_variogram(psi, coords, 10);
    REQUIRE(bins.back().pair_count > 100);
    sill_acc += bins.back().semivariance;
  }
  const double sill = sill_acc / reps;
  const double expect = 0.6 * 0.6 + 0.05 * 0.05;
  CHECK(sill == doctest::Approx(expect).epsilon(0.25));

  SUBCASE("semivariance grows with distance for a spatial field") {
    const GenerativeResult g = simulate_generative(sites, mesh, truth, 1, 365.25, 77);
    std::vector<double> psi;
    for (const auto& st : g.site_truth) psi.push_back(std::log(st.params.mu));
    const auto bins = empirical_variogram(psi, coords, 8);
    CHECK(bins.front().semivariance < bins.back().semivariance);
  }
}

TEST_CASE("mh chain matches the conditional density it targets") {
  // With all but one proposal scale zero, the chain samples the 1-d
  // conditional of that component. Compare thinned draws against the grid
  // cdf of exp(log_marginal_hyper).
  const LatticeMesh mesh = build_mesh({0.0, 0.0, 1.5, 1.5}, 1.5, 0.0);
  std::vector<Eigen::Vector2d> sites{{0.2, 0.3}, {1.1, 0.4}, {0.5, 1.2}, {1.3, 1.0}};
  Rng rng(2718);
  const int N = 4;
  Eigen::VectorXd eta(3 * N);
  for (int i = 0; i < N; ++i) {
    eta[i] = 2.0 + 0.3 * rng.normal();
    eta[N + i] = -0.6 + 0.2 * rng.normal();
    eta[2 * N + i] = 0.1 + 0.1 * rng.normal();
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < N; ++i) {
    const int ids[3] = {i, N + i, 2 * N + i};
    Eigen::Matrix3d block;
    block << 60.0, 8.0, 2.0, 8.0, 45.0, -3.0, 2.0, -3.0, 35.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) trips.emplace_back(ids[a], ids[b], block(a, b));
  }
  SparseMatrixd qd(3 * N, 3 * N);
  qd.setFromTriplets(trips.begin(), trips.end());
  PriorConfig prior = PriorConfig::defaults(2.0);
  prior.sigma_beta_sq = 25.0;
  const SmoothModel model(eta, qd, mesh, build_projection(mesh, sites), prior);

  // free component: sigma_psi (index 0), then rho_psi (index 2)
  for (int freek : {0, 2}) {
    // wide 1-d proposal and heavy thinning so the kept draws are nearly
    // independent (the ks test assumes iid)
    ChainConfig cfg;
    cfg.n_iterations = 123000;
    cfg.n_burnin = 3000;
    cfg.thin = 120;
    cfg.seed = 31u + static_cast<unsigned>(freek);
    cfg.adapt = false;
    cfg.proposal_scales = {0, 0, 0, 0, 0, 0, 0};
    cfg.proposal_scales[static_cast<std::size_t>(freek)] = 2.0;
    const PosteriorSamples s = run_chain(model, cfg);
    REQUIRE(s.n_kept() == 1000);

    // conditional grid cdf: other components pinned at the chain's values
    const HyperParameters pinned = HyperParameters::from_array(
        {s.theta_draws(0, 0), s.theta_draws(0, 1), s.theta_draws(0, 2), s.theta_draws(0, 3),
         s.theta_draws(0, 4), s.theta_draws(0, 5), s.theta_draws(0, 6)});
    std::vector<double> draws(static_cast<std::size_t>(s.n_kept()));
    for (int r = 0; r < s.n_kept(); ++r) draws[static_cast<std::size_t>(r)] = s.theta_draws(r, freek);
    const double lo = 0.5 * *std::min_element(draws.begin(), draws.end());
    const double hi = 2.0 * *std::max_element(draws.begin(), draws.end());
    const int G = 2000;
    std::vector<double> grid(G), dens(G);
    SmoothWorkspace ws(model);
    double dmax = -1e300;
    for (int g = 0; g < G; ++g) {
      grid[static_cast<std::size_t>(g)] =
          lo * std::exp(std::log(hi / lo) * (g + 0.5) / G);  // log-spaced
      auto th = pinned.as_array();
      th[static_cast<std::size_t>(freek)] = grid[static_cast<std::size_t>(g)];
      // target on the theta scale: marginal + log-jacobian already excluded
      // because the grid integrates in theta directly
      dens[static_cast<std::size_t>(g)] =
          ws.log_marginal_hyper(HyperParameters::from_array(th));
      dmax = std::max(dmax, dens[static_cast<std::size_t>(g)]);
    }
    std::vector<double> cdf(G);
    double acc = 0.0;
    for (int g = 0; g < G; ++g) {
      const double w = grid[static_cast<std::size_t>(g)] * std::log(hi / lo) / G;  // d theta
      acc += std::exp(dens[static_cast<std::size_t>(g)] - dmax) * w;
      cdf[static_cast<std::size_t>(g)] = acc;
    }
    for (auto& c : cdf) c /= acc;
    const double p = test_support::ks_test_pvalue(draws, [&](double x) {
      const auto it = std::lower_bound(grid.begin(), grid.end(), x);
      if (it == grid.begin()) return 0.0;
      const auto idx = static_cast<std::size_t>(it - grid.begin()) - 1;
      return cdf[idx];
    });
    CAPTURE(freek);
    CHECK(p > 0.01);
  }
}
