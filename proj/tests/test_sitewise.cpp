#include <doctest.h>

#include <cmath>

#include "exlgm/errors.hpp"
#include "exlgm/optimize.hpp"
#include "exlgm/rng.hpp"
#include "exlgm/simulate.hpp"
#include "exlgm/sitewise.hpp"

using namespace exlgm;

TEST_CASE("threshold selection") {
  const std::vector<double> v{0.0, 0.0, 1.0, 2.0, 3.0, 4.0};
  CHECK(select_threshold(v, 0.75) == doctest::Approx(3.25).epsilon(1e-15));

  const std::vector<double> c{2.5, 2.5, 2.5, 2.5};
  CHECK(select_threshold(c, 0.3) == 2.5);
  CHECK(select_threshold(c, 0.9) == 2.5);

  const std::vector<double> one{0.0, 0.0, 0.0, 5.0};
  CHECK(select_threshold(one, 0.25) == 5.0);
  CHECK(select_threshold(one, 0.95) == 5.0);

  const std::vector<double> zeros{0.0, 0.0};
  CHECK_THROWS_AS(select_threshold(zeros, 0.75), degenerate_site);
  CHECK_THROWS_AS(select_threshold(v, 1.0), invalid_input);
}

TEST_CASE("too few exceedances guard") {
  SiteSeries s;
  s.site_id = 3;
  // 12 positives, q = 0.75 leaves 3 exceedances
  for (int i = 1; i <= 12; ++i) s.values.push_back(static_cast<double>(i));
  FitOptions opts;
  opts.threshold_quantile = 0.75;
  opts.n_block = 1.0;
  opts.min_exceedances = 10;
  CHECK_THROWS_AS(fit_site(s, opts), too_few_exceedances);
  try {
    fit_site(s, opts);
  } catch (const too_few_exceedances& e) {
    CHECK(e.count == 3);
    CHECK(e.required == 10);
  }
}

TEST_CASE("fit recovers simulated parameters within 3 standard errors") {
  std::vector<SiteTruth> truth{{1, 0.0, 0.0, {10.0, 5.0, 0.1}}};
  const Dataset data = simulate_fixed(truth, 7305, 365.25, 2024);
  SiteSeries s;
  s.site_id = 1;
  s.values.assign(data.values.row(0).begin(), data.values.row(0).end());
  FitOptions opts;
  opts.threshold_quantile = 0.75;
  opts.n_block = 20.0;
  const SiteFit fit = fit_site(s, opts);
  CHECK(fit.n_exceedances >= opts.min_exceedances);

  const TransformedParameters t = link_forward({10.0, 5.0, 0.1});
  const Eigen::Matrix3d cov = fit.info.inverse();
  CHECK(std::abs(fit.eta_hat.psi - t.psi) < 3.0 * std::sqrt(cov(0, 0)));
  CHECK(std::abs(fit.eta_hat.tau - t.tau) < 3.0 * std::sqrt(cov(1, 1)));
  CHECK(std::abs(fit.eta_hat.phi - t.phi) < 3.0 * std::sqrt(cov(2, 2)));

  SUBCASE("information matrix is symmetric positive definite") {
    CHECK((fit.info - fit.info.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(fit.info);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(Eigen::LLT<Eigen::Matrix3d>(fit.info).info() == Eigen::Success);
  }

  SUBCASE("jittered starts agree") {
    // refit after perturbing the data-driven start through restarts: compare
    // against optimizing from 5 jittered points directly
    ExceedanceSet e = extract_exceedances(s, opts);
    const Objective f = [&](const Eigen::VectorXd& x) {
      if (std::abs(x[0]) > 700.0 || std::abs(x[0] + x[1]) > 700.0)
        return std::numeric_limits<double>::infinity();
      const double ll = generalized_log_likelihood(e, link_inverse({x[0], x[1], x[2]}));
      return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };
    Rng rng(5);
    Eigen::VectorXd ref(3);
    ref << fit.eta_hat.psi, fit.eta_hat.tau, fit.eta_hat.phi;
    for (int k = 0; k < 5; ++k) {
      Eigen::VectorXd x0 = ref;
      for (int j = 0; j < 3; ++j) x0[j] += 0.3 * rng.normal();
      if (!std::isfinite(f(x0))) continue;
      const OptimResult r = minimize_bfgs(f, x0);
      REQUIRE(r.converged);
      CHECK((r.x - ref).lpNorm<Eigen::Infinity>() < 1e-4);
    }
  }

  SUBCASE("estimates unchanged by added zero observations") {
    SiteSeries padded = s;
    padded.values.insert(padded.values.end(), 500, 0.0);
    const SiteFit fit2 = fit_site(padded, opts);
    CHECK(fit2.eta_hat.psi == doctest::Approx(fit.eta_hat.psi).epsilon(1e-10));
    CHECK(fit2.eta_hat.tau == doctest::Approx(fit.eta_hat.tau).epsilon(1e-10));
    CHECK(fit2.eta_hat.phi == doctest::Approx(fit.eta_hat.phi).epsilon(1e-10));
  }
}

TEST_CASE("fit_all_sites aggregates exclusions and is order independent") {
  std::vector<SiteTruth> truth{{11, 0.0, 0.0, {10.0, 5.0, 0.1}},
                               {22, 1.0, 0.0, {12.0, 6.0, 0.05}}};
  Dataset data = simulate_fixed(truth, 6000, 365.25, 77);
  // make a third site all zeros
  data.sites.push_back({33, 2.0, 0.0});
  data.values.conservativeResize(3, Eigen::NoChange);
  data.values.row(2).setZero();

  FitOptions opts;
  opts.n_block = 6000.0 / 365.25;
  const FitReport rep = fit_all_sites(data, opts, 2);
  CHECK(rep.fits.size() == 2);
  REQUIRE(rep.exclusions.size() == 1);
  CHECK(rep.exclusions[0].site_id == 33);

  // permuting sites leaves per-site results identical
  Dataset perm;
  perm.sites = {data.sites[1], data.sites[0]};
  perm.values.resize(2, data.values.cols());
  perm.values.row(0) = data.values.row(1);
  perm.values.row(1) = data.values.row(0);
  const FitReport rep2 = fit_all_sites(perm, opts, 2);
  REQUIRE(rep2.fits.size() == 2);
  CHECK(rep2.fits[0].site_id == 22);
  CHECK(rep2.fits[0].eta_hat.psi == rep.fits[1].eta_hat.psi);
  CHECK(rep2.fits[1].eta_hat.psi == rep.fits[0].eta_hat.psi);
  CHECK((rep2.fits[0].info - rep.fits[1].info).cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("all sites failing throws") {
    Dataset dead;
    dead.sites = {{1, 0.0, 0.0}};
    dead.values.resize(1, 10);
    dead.values.setZero();
    CHECK_THROWS_AS(fit_all_sites(dead, opts, 1), numeric_error);
  }
}

TEST_CASE("gaussian profile distance is zero for an exact gaussian objective") {
  Eigen::Matrix3d info;
  info << 50.0, 5.0, 1.0, 5.0, 40.0, -2.0, 1.0, -2.0, 30.0;
  const Eigen::Vector3d center(0.4, -0.2, 0.1);
  const auto nll = [&](const Eigen::VectorXd& x) {
    const Eigen::Vector3d d = x - center;
    return 3.7 + 0.5 * d.dot(info * d);
  };
  const ApproxQuality q = gaussian_profile_distance(nll, center, info, 3.0);
  for (double s : q.sup_distance) CHECK(s < 1e-10);
}

TEST_CASE("gaussian likelihood check on simulated data") {
  std::vector<SiteTruth> truth{{1, 0.0, 0.0, {10.0, 5.0, 0.1}}};
  // enough replicates for >= 60 exceedances
  const Dataset data = simulate_fixed(truth, 24000, 365.25, 31);
  SiteSeries s;
  s.site_id = 1;
  s.values.assign(data.values.row(0).begin(), data.values.row(0).end());
  FitOptions opts;
  opts.n_block = 24000.0 / 365.25;
  const SiteFit fit = fit_site(s, opts);
  REQUIRE(fit.n_exceedances >= 60);
  const ApproxQuality q = gaussian_likelihood_check(s, fit, opts, 3.0);
  CHECK(q.sup_distance[0] < 0.1);  // psi
  CHECK(q.sup_distance[2] < 0.1);  // phi
}
