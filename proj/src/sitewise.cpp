#include "exlgm/sitewise.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "exlgm/errors.hpp"
#include "exlgm/optimize.hpp"
#include "exlgm/rng.hpp"
#include "exlgm/stats.hpp"

namespace exlgm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// negative generalized log likelihood in transformed coordinates
Objective make_objective(ExceedanceSet exc) {
  return [e = std::move(exc)](const Eigen::VectorXd& eta) -> double {
    if (std::abs(eta[0]) > 700.0 || std::abs(eta[0] + eta[1]) > 700.0) return kInf;
    const PPParameters p = link_inverse({eta[0], eta[1], eta[2]});
    const double ll = generalized_log_likelihood(e, p);
    return ll == -kInf ? kInf : -ll;
  };
}

Eigen::Vector3d starting_point(const ExceedanceSet& e) {
  double me = 0.0;
  for (double y : e.exceedances) me += y - e.threshold;
  me /= static_cast<double>(e.exceedances.size());
  const double xi0 = 0.05;
  const double kappa0 = me * (1.0 - xi0);
  const double rate = static_cast<double>(e.exceedances.size()) / e.n_block;
  double sigma0 = kappa0 * std::pow(rate, xi0);
  double mu0 = e.threshold + (sigma0 - kappa0) / xi0;
  if (!(mu0 > 0.0) || !std::isfinite(mu0)) mu0 = std::max(e.threshold, 1e-8);
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) sigma0 = std::max(me, 1e-8);
  const TransformedParameters t = link_forward({mu0, sigma0, xi0});
  return {t.psi, t.tau, t.phi};
}

SiteSeries series_from_row(const Dataset& d, Eigen::Index i) {
  SiteSeries s;
  s.site_id = d.sites[static_cast<std::size_t>(i)].site_id;
  s.lon = d.sites[static_cast<std::size_t>(i)].lon;
  s.lat = d.sites[static_cast<std::size_t>(i)].lat;
  s.values.assign(d.values.row(i).begin(), d.values.row(i).end());
  return s;
}

}  // namespace

double select_threshold(std::span<const double> values, double q) {
  if (!(q > 0.0 && q < 1.0)) throw invalid_input("threshold quantile must lie in (0, 1)");
  std::vector<double> pos;
  pos.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) throw invalid_input("non-finite value in series");
    if (v > 0.0) pos.push_back(v);
  }
  if (pos.empty()) throw degenerate_site("series has no strictly positive values");
  return quantile_type7(pos, q);
}

ExceedanceSet extract_exceedances(const SiteSeries& series, const FitOptions& opts) {
  if (!(opts.n_block > 0.0)) throw invalid_input("n_block must be positive");
  ExceedanceSet e;
  e.threshold = select_threshold(series.values, opts.threshold_quantile);
  e.n_total = static_cast<std::int64_t>(series.values.size());
  e.n_block = opts.n_block;
  for (double v : series.values)
    if (v > e.threshold) e.exceedances.push_back(v);
  if (static_cast<int>(e.exceedances.size()) < opts.min_exceedances)
    throw too_few_exceedances(series.site_id, static_cast<int>(e.exceedances.size()),
                              opts.min_exceedances);
  return e;
}

SiteFit fit_site(const SiteSeries& series, const FitOptions& opts) {
  ExceedanceSet exc = extract_exceedances(series, opts);

  SiteFit fit;
  fit.site_id = series.site_id;
  fit.lon = series.lon;
  fit.lat = series.lat;
  fit.threshold = exc.threshold;
  fit.n_exceedances = static_cast<int>(exc.exceedances.size());

  const Eigen::VectorXd start = starting_point(exc);
  const Objective f = make_objective(std::move(exc));

  OptimResult best;
  best.converged = false;
  Rng jitter = Rng::substream(0x5f17u, static_cast<std::uint64_t>(series.site_id));
  for (int attempt = 0; attempt < 5; ++attempt) {
    Eigen::VectorXd x = start;
    if (attempt > 0)
      for (int k = 0; k < 3; ++k) x[k] += 0.3 * jitter.normal();
    if (!std::isfinite(f(x))) continue;
    OptimResult r = minimize_bfgs(f, x);
    if (r.converged && (!best.converged || r.value < best.value)) best = r;
    if (best.converged && attempt == 0) break;  // first start is almost always enough
  }
  if (!best.converged)
    throw convergence_failure("site " + std::to_string(series.site_id) +
                              ": optimizer did not converge after restarts");

  fit.eta_hat = {best.x[0], best.x[1], best.x[2]};
  Eigen::Matrix3d H = fd_hessian(f, best.x, 1e-4);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmax > 0.0))
    throw convergence_failure("site " + std::to_string(series.site_id) +
                              ": information matrix has no positive curvature");
  const double floor = 1e-8 * lmax;
  if (es.eigenvalues().minCoeff() < floor) {
    Eigen::Vector3d ev = es.eigenvalues().cwiseMax(floor);
    H = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    H = 0.5 * (H + H.transpose());
    fit.hessian_repaired = true;
  }
  fit.info = H;
  return fit;
}

FitReport fit_all_sites(const Dataset& data, const FitOptions& opts, int n_threads) {
  data.validate();
  const Eigen::Index n = data.n_sites();
  if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(n)));

  struct Slot {
    bool ok = false;
    SiteFit fit;
    std::string error;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n));
  std::atomic<Eigen::Index> next{0};

  auto worker = [&]() {
    for (;;) {
      const Eigen::Index i = next.fetch_add(1);
      if (i >= n) return;
      auto& slot = slots[static_cast<std::size_t>(i)];
      try {
        slot.fit = fit_site(series_from_row(data, i), opts);
        slot.ok = true;
      } catch (const std::exception& ex) {
        slot.error = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  FitReport report;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& slot = slots[static_cast<std::size_t>(i)];
    if (slot.ok)
      report.fits.push_back(std::move(slot.fit));
    else
      report.exclusions.push_back({data.sites[static_cast<std::size_t>(i)].site_id, slot.error});
  }
  if (report.fits.empty()) throw numeric_error("all sites failed to fit");
  return report;
}

ApproxQuality gaussian_profile_distance(const Objective& neg_loglik,
                                        const Eigen::Vector3d& eta_hat,
                                        const Eigen::Matrix3d& info, double grid_halfwidth) {
  if (!(grid_halfwidth > 0.0)) throw invalid_input("grid halfwidth must be positive");
  const Eigen::VectorXd eta = eta_hat;
  const double f0 = neg_loglik(eta);
  const Eigen::Matrix3d cov = info.inverse();

  ApproxQuality q{};
  constexpr int kGrid = 241;
  for (int j = 0; j < 3; ++j) {
    const double se = std::sqrt(cov(j, j));
    const double qjj = info(j, j);
    double sup = 0.0;
    for (int g = 0; g < kGrid; ++g) {
      const double delta = (-grid_halfwidth + 2.0 * grid_halfwidth * g / (kGrid - 1)) * se;
      Eigen::VectorXd x = eta;
      x[j] += delta;
      const double fx = neg_loglik(x);
      const double profile = std::isfinite(fx) ? std::exp(f0 - fx) : 0.0;
      const double gauss = std::exp(-0.5 * qjj * delta * delta);
      sup = std::max(sup, std::abs(profile - gauss));
    }
    q.sup_distance[static_cast<std::size_t>(j)] = sup;
  }
  return q;
}

ApproxQuality gaussian_likelihood_check(const SiteSeries& series, const SiteFit& fit,
                                        const FitOptions& opts, double grid_halfwidth) {
  ExceedanceSet exc = extract_exceedances(series, opts);
  const Objective f = make_objective(std::move(exc));
  const Eigen::Vector3d eta{fit.eta_hat.psi, fit.eta_hat.tau, fit.eta_hat.phi};
  return gaussian_profile_distance(f, eta, fit.info, grid_halfwidth);
}

}  // namespace exlgm
