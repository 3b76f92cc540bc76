#include <doctest.h>

#include <cmath>
#include <limits>

#include "exlgm/errors.hpp"
#include "exlgm/link.hpp"
#include "exlgm/priors.hpp"
#include "support.hpp"

using namespace exlgm;
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("beta shape prior") {
  CHECK(beta_shape_log_prior(0.0) == doctest::Approx(std::log(2.1875)).epsilon(1e-12));
  CHECK(beta_shape_log_prior(0.0) == doctest::Approx(0.782759).epsilon(1e-5));
  CHECK(beta_shape_log_prior(0.5) == -kInf);
  CHECK(beta_shape_log_prior(-0.5) == -kInf);
  CHECK(beta_shape_log_prior(0.7) == -kInf);
  // exact symmetry
  for (int i = 0; i < 100; ++i) {
    const double xi = 0.499 * (i + 0.5) / 100.0;
    CHECK(beta_shape_log_prior(xi) == beta_shape_log_prior(-xi));
  }
}

TEST_CASE("phi prior integrates to one") {
  const double mass = test_support::integrate(
      [](double p) { return std::exp(phi_log_prior(p)); }, -10.0, 10.0, 1e-11);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("phi prior matches the change of variables") {
  for (double phi : {-1.0, -0.3, 0.0, 0.097, 0.3, 1.0}) {
    const double d = 1e-6;
    const double jac =
        (shape_transform_inverse(phi + d) - shape_transform_inverse(phi - d)) / (2.0 * d);
    const double expected = beta_shape_log_prior(shape_transform_inverse(phi)) + std::log(jac);
    CHECK(phi_log_prior(phi) == doctest::Approx(expected).epsilon(1e-5));
  }
}

TEST_CASE("phi prior mode") {
  // The pushforward mode does not sit exactly at the Beta(4,4) center: the
  // Jacobian shifts it. Grid search locates it and the inverse transform puts
  // it near xi = 0.0252 (value frozen from an independent grid search of the
  // change-of-variables density).
  double best = -kInf, arg = 0.0;
  for (int i = 0; i <= 400000; ++i) {
    const double phi = -1.0 + 2.0 * i / 400000.0;
    const double v = phi_log_prior(phi);
    if (v > best) {
      best = v;
      arg = phi;
    }
  }
  CHECK(shape_transform_inverse(arg) == doctest::Approx(0.02516).epsilon(2e-3));
}

TEST_CASE("phi prior is finite on a wide range") {
  for (double phi : {-100.0, -20.0, -5.0, 0.0, 5.0, 20.0, 150.0}) {
    CHECK(std::isfinite(phi_log_prior(phi)));
  }
}

TEST_CASE("pc nugget prior") {
  CHECK(pc_prior_nugget_log(1e-12, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(pc_prior_nugget_log(1.0, 2.0) == doctest::Approx(std::log(2.0) - 2.0).epsilon(1e-12));
  CHECK(pc_prior_nugget_log(1.0, 2.0) == doctest::Approx(-1.306853).epsilon(1e-6));
  CHECK(pc_prior_nugget_log(-1.0, 2.0) == -kInf);
  CHECK(pc_prior_nugget_log(0.0, 2.0) == -kInf);
  const double mass = test_support::integrate(
      [](double s) { return std::exp(pc_prior_nugget_log(s, 1.7)); }, 1e-12, 40.0, 1e-12);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("pc matern prior") {
  CHECK(pc_prior_matern_log(1.0, 1.0, 1.0, 1.0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(pc_prior_matern_log(-1.0, 1.0, 1.0, 1.0) == -kInf);
  CHECK(pc_prior_matern_log(1.0, 0.0, 1.0, 1.0) == -kInf);

  SUBCASE("factorizes into s and rho marginals") {
    for (double s : {0.3, 1.1}) {
      for (double rho : {0.5, 2.5}) {
        const double joint = pc_prior_matern_log(s, rho, 1.3, 0.7);
        const double s_part = std::log(1.3) - 1.3 * s;
        const double rho_part = std::log(0.7) - 2.0 * std::log(rho) - 0.7 / rho;
        CHECK(joint == doctest::Approx(s_part + rho_part).epsilon(1e-12));
      }
    }
  }

  SUBCASE("double integral is one") {
    // the rho tail decays like rho^-2, so integrate in v = 1/rho
    auto inner = [](double s, double ls, double lr) {
      return test_support::integrate(
          [=](double v) {
            return std::exp(pc_prior_matern_log(s, 1.0 / v, ls, lr)) / (v * v);
          },
          1e-12, 60.0, 1e-11);
    };
    const double mass = test_support::integrate(
        [&](double s) { return inner(s, 1.0, 1.0); }, 1e-12, 40.0, 1e-9);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("rate calibration") {
  CHECK(calibrate_rate_from_tail(1.0, 0.05) == doctest::Approx(2.995732).epsilon(1e-6));
  CHECK(calibrate_rate_from_tail(3.0, std::exp(-3.0)) == doctest::Approx(1.0).epsilon(1e-12));
  // definitional round trip: P(X > u0) = exp(-lambda u0) = alpha
  const double lam = calibrate_rate_from_tail(2.5, 0.1);
  CHECK(std::exp(-lam * 2.5) == doctest::Approx(0.1).epsilon(1e-12));
  // range version: P(rho < rho0) = exp(-lambda/rho0) = alpha
  const double lr = calibrate_range_rate(4.0, 0.05);
  CHECK(std::exp(-lr / 4.0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK_THROWS_AS(calibrate_rate_from_tail(0.0, 0.5), invalid_input);
  CHECK_THROWS_AS(calibrate_rate_from_tail(1.0, 1.5), invalid_input);
}

TEST_CASE("prior config defaults and validation") {
  const PriorConfig c = PriorConfig::defaults(20.0);
  CHECK(c.lambda_sigma_psi == doctest::Approx(2.995732).epsilon(1e-6));
  CHECK(c.lambda_s_psi == doctest::Approx(2.995732 / 2.0).epsilon(1e-6));
  CHECK(c.lambda_rho_psi == doctest::Approx(2.995732 * 2.0).epsilon(1e-6));
  CHECK(c.sigma_beta_sq == 10000.0);
  c.validate();
  PriorConfig bad = c;
  bad.lambda_s_tau = -1.0;
  CHECK_THROWS_AS(bad.validate(), invalid_input);
}
