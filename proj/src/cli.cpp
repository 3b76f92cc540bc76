#include "exlgm/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "exlgm/config.hpp"
#include "exlgm/data.hpp"
#include "exlgm/errors.hpp"
#include "exlgm/io.hpp"
#include "exlgm/posterior.hpp"
#include "exlgm/simulate.hpp"
#include "exlgm/sitewise.hpp"
#include "exlgm/smoother.hpp"
#include "exlgm/stats.hpp"

namespace exlgm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Dataset::Site> grid_sites(const SimulateGridConfig& g) {
  std::vector<Dataset::Site> sites;
  sites.reserve(static_cast<std::size_t>(g.nx) * g.ny);
  std::int64_t id = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      sites.push_back({id++, g.origin_x + i * g.spacing, g.origin_y + j * g.spacing});
  return sites;
}

BoundingBox sites_bbox(const std::vector<Dataset::Site>& sites) {
  BoundingBox b{sites.front().lon, sites.front().lat, sites.front().lon, sites.front().lat};
  for (const auto& s : sites) {
    b.xmin = std::min(b.xmin, s.lon);
    b.xmax = std::max(b.xmax, s.lon);
    b.ymin = std::min(b.ymin, s.lat);
    b.ymax = std::max(b.ymax, s.lat);
  }
  return b;
}

BoundingBox fits_bbox(const std::vector<SiteFit>& fits) {
  BoundingBox b{fits.front().lon, fits.front().lat, fits.front().lon, fits.front().lat};
  for (const auto& f : fits) {
    b.xmin = std::min(b.xmin, f.lon);
    b.xmax = std::max(b.xmax, f.lon);
    b.ymin = std::min(b.ymin, f.lat);
    b.ymax = std::max(b.ymax, f.lat);
  }
  return b;
}

double bbox_diameter(const BoundingBox& b) {
  return std::hypot(b.xmax - b.xmin, b.ymax - b.ymin);
}

LatticeMesh mesh_from_config(const MeshConfig& mc, const BoundingBox& fallback_bbox) {
  const BoundingBox bbox = mc.bbox.value_or(fallback_bbox);
  return build_mesh(bbox, mc.spacing, mc.margin_or_default());
}

json summary_block(const DrawSummary& s) {
  return json{{"mean", s.mean}, {"sd", s.sd}, {"q025", s.q025}, {"q50", s.q50}, {"q975", s.q975}};
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_path,
                 const std::string& truth_path, std::optional<std::uint64_t> seed_flag) {
  if (!cfg.simulate) throw invalid_input("config has no 'simulate' section");
  const SimulateConfig& sc = *cfg.simulate;
  const std::uint64_t seed = seed_flag.value_or(sc.seed);
  const auto sites = grid_sites(sc.grid);

  json truth;
  truth["seed"] = seed;
  truth["T"] = sc.T;
  truth["block_size"] = sc.block_size;

  Dataset data;
  if (sc.mode == SimulateConfig::Mode::fixed) {
    std::vector<SiteTruth> st;
    st.reserve(sites.size());
    for (const auto& s : sites) st.push_back({s.site_id, s.lon, s.lat, *sc.fixed});
    data = simulate_fixed(st, sc.T, sc.block_size, seed);
    truth["mode"] = "fixed";
    truth["mu"] = sc.fixed->mu;
    truth["sigma"] = sc.fixed->sigma;
    truth["xi"] = sc.fixed->xi;
  } else {
    if (!cfg.mesh) throw invalid_input("generative simulation requires a 'mesh' section");
    const LatticeMesh mesh = mesh_from_config(*cfg.mesh, sites_bbox(sites));
    GenerativeResult res = simulate_generative(sites, mesh, *sc.generative, sc.T, sc.block_size, seed);
    data = std::move(res.data);
    truth["mode"] = "generative";
    json th;
    const auto a = sc.generative->theta.as_array();
    for (int k = 0; k < 7; ++k) th[HyperParameters::names[static_cast<std::size_t>(k)]] =
        a[static_cast<std::size_t>(k)];
    truth["theta"] = th;
    truth["beta_psi"] = sc.generative->beta_psi;
    truth["beta_tau"] = sc.generative->beta_tau;
    truth["beta_phi"] = sc.generative->beta_phi;
    json per_site = json::array();
    for (const auto& s : res.site_truth)
      per_site.push_back(json{{"site_id", s.site_id},
                              {"mu", s.params.mu},
                              {"sigma", s.params.sigma},
                              {"xi", s.params.xi}});
    truth["sites"] = per_site;
  }
  write_dataset(data, out_path);
  if (!truth_path.empty()) {
    std::ofstream out(truth_path, std::ios::binary);
    if (!out) throw invalid_input("cannot open for writing: " + truth_path);
    out << truth.dump(2) << "\n";
  }
  return 0;
}

int cmd_maxfit(const RunConfig& cfg, const std::string& data_path, const std::string& out_path,
               int threads) {
  if (!cfg.n_block) throw invalid_input("maxfit requires 'n_block' in the config");
  const Dataset data = load_dataset(data_path);
  FitOptions opts;
  opts.threshold_quantile = cfg.threshold_quantile;
  opts.n_block = *cfg.n_block;
  opts.min_exceedances = cfg.min_exceedances;
  const FitReport report = fit_all_sites(data, opts, threads);
  write_fits_csv(report.fits, out_path);
  write_exclusions_csv(report.exclusions, out_path + ".exclusions.csv");
  std::fprintf(stderr, "maxfit: %zu sites fitted, %zu excluded\n", report.fits.size(),
               report.exclusions.size());
  return 0;
}

int cmd_smooth(const RunConfig& cfg, const std::string& fits_path, const std::string& out_dir,
               bool allow_exclusions, const std::string& mesh_out) {
  if (!cfg.mesh) throw invalid_input("smooth requires a 'mesh' section in the config");
  const auto fits = read_fits_csv(fits_path);
  const auto exclusions = read_exclusions_csv(fits_path + ".exclusions.csv");
  if (!exclusions.empty() && !allow_exclusions)
    throw invalid_input(std::to_string(exclusions.size()) +
                        " sites were excluded by maxfit; pass --allow-exclusions to proceed");

  const BoundingBox bbox = fits_bbox(fits);
  const LatticeMesh mesh = mesh_from_config(*cfg.mesh, bbox);
  const PriorConfig prior =
      cfg.priors ? *cfg.priors : PriorConfig::defaults(bbox_diameter(bbox));

  const SmoothModel model = SmoothModel::from_fits(fits, mesh, prior);
  const PosteriorSamples samples = run_chain(model, cfg.chain);

  fs::create_directories(out_dir);
  write_theta_csv(samples, (fs::path(out_dir) / "theta_draws.csv").string());
  write_latent_bin(samples, (fs::path(out_dir) / "latent_draws.bin").string());
  if (!mesh_out.empty()) write_mesh_csv(mesh, mesh_out);

  json summary;
  summary["n_sites"] = samples.n_sites;
  summary["n_mesh_nodes"] = samples.n_mesh_nodes;
  summary["n_kept"] = samples.n_kept();
  summary["seed"] = samples.seed;
  summary["acceptance_rate"] = samples.acceptance_rate;
  summary["latent_layout"] =
      "psi[N], tau[N], phi[N], beta_psi, u_psi[M], beta_tau, u_tau[M], beta_phi";
  json hyper;
  std::vector<double> col(static_cast<std::size_t>(samples.n_kept()));
  for (int k = 0; k < 7; ++k) {
    for (int r = 0; r < samples.n_kept(); ++r)
      col[static_cast<std::size_t>(r)] = samples.theta_draws(r, k);
    hyper[HyperParameters::names[static_cast<std::size_t>(k)]] = summary_block(summarize_draws(col));
  }
  summary["hyperparameters"] = hyper;
  const int N = samples.n_sites, m = samples.n_mesh_nodes;
  const int idx_beta[3] = {3 * N, 3 * N + m + 1, 3 * N + 2 * m + 2};
  const char* beta_names[3] = {"beta_psi", "beta_tau", "beta_phi"};
  json intercepts;
  for (int b = 0; b < 3; ++b) {
    for (int r = 0; r < samples.n_kept(); ++r)
      col[static_cast<std::size_t>(r)] = samples.latent_draws(r, idx_beta[b]);
    intercepts[beta_names[b]] = summary_block(summarize_draws(col));
  }
  summary["intercepts"] = intercepts;
  std::ofstream out(fs::path(out_dir) / "summary.json", std::ios::binary);
  if (!out) throw invalid_input("cannot write summary.json in " + out_dir);
  out << summary.dump(2) << "\n";
  std::fprintf(stderr, "smooth: %d kept draws, acceptance %.3f\n", samples.n_kept(),
               samples.acceptance_rate);
  return 0;
}

PosteriorSamples load_posterior_dir(const std::string& post_dir, int n_sites) {
  std::ifstream in(fs::path(post_dir) / "summary.json", std::ios::binary);
  if (!in) throw invalid_input("cannot open " + post_dir + "/summary.json");
  json summary = json::parse(in);
  const int n = summary.at("n_sites").get<int>();
  const int m = summary.at("n_mesh_nodes").get<int>();
  if (n != n_sites)
    throw invalid_input("posterior was computed for " + std::to_string(n) +
                        " sites but the fit table has " + std::to_string(n_sites));
  PosteriorSamples samples =
      read_posterior((fs::path(post_dir) / "theta_draws.csv").string(),
                     (fs::path(post_dir) / "latent_draws.bin").string(), n, m);
  samples.acceptance_rate = summary.at("acceptance_rate").get<double>();
  samples.seed = summary.at("seed").get<std::uint64_t>();
  return samples;
}

int cmd_returnlevels(const RunConfig& cfg, const std::string& fits_path,
                     const std::string& post_dir, const std::string& out_path) {
  const auto fits = read_fits_csv(fits_path);
  const PosteriorSamples samples = load_posterior_dir(post_dir, static_cast<int>(fits.size()));
  std::vector<ReturnLevelRow> rows;
  for (double M : cfg.return_periods) {
    const auto r = return_level_surface(samples, fits, M);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  write_return_levels_csv(rows, out_path);
  return 0;
}

int cmd_predict(const RunConfig& cfg, const std::string& fits_path, const std::string& post_dir,
                std::int64_t site_id, const std::string& out_path,
                std::optional<std::uint64_t> seed_flag) {
  const auto fits = read_fits_csv(fits_path);
  const PosteriorSamples samples = load_posterior_dir(post_dir, static_cast<int>(fits.size()));
  int site_index = -1;
  for (std::size_t i = 0; i < fits.size(); ++i)
    if (fits[i].site_id == site_id) site_index = static_cast<int>(i);
  if (site_index < 0) throw invalid_input("site_id " + std::to_string(site_id) + " not in fit table");
  Rng rng(seed_flag.value_or(0));
  const auto draws = posterior_predictive_draws(
      samples, site_index, fits[static_cast<std::size_t>(site_index)].threshold, cfg.predict, rng);
  write_predictive_csv(draws, out_path);
  return 0;
}

int cmd_variogram(const std::string& fits_path, const std::string& param, int n_bins,
                  double max_dist, const std::string& out_path) {
  const auto fits = read_fits_csv(fits_path);
  std::vector<double> values;
  std::vector<Eigen::Vector2d> coords;
  for (const auto& f : fits) {
    coords.emplace_back(f.lon, f.lat);
    if (param == "psi")
      values.push_back(f.eta_hat.psi);
    else if (param == "tau")
      values.push_back(f.eta_hat.tau);
    else if (param == "phi")
      values.push_back(f.eta_hat.phi);
    else
      throw invalid_input("variogram parameter must be psi, tau or phi");
  }
  write_variogram_csv(empirical_variogram(values, coords, n_bins, max_dist), out_path);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Spatial peaks-over-threshold extremes with latent Gaussian smoothing"};
  app.require_subcommand(1);

  std::string config_path, data_path, fits_path, post_dir, out_path, truth_path, mesh_out;
  std::string param = "psi";
  int threads = 0, n_bins = 15;
  double max_dist = 0.0;
  std::int64_t site_id = 0;
  bool allow_exclusions = false;
  std::optional<std::uint64_t> seed_flag;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed_flag = s; },
        "override the seed from the config");
  };

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  sim->add_option("--config", config_path, "run configuration (JSON)")->required();
  sim->add_option("--out", out_path, "output data CSV")->required();
  sim->add_option("--truth-out", truth_path, "truth record (JSON)");
  add_seed(sim);

  CLI::App* fit = app.add_subcommand("maxfit", "sitewise penalized maximum likelihood");
  fit->add_option("--config", config_path, "run configuration (JSON)")->required();
  fit->add_option("--data", data_path, "input data CSV")->required();
  fit->add_option("--out", out_path, "output fit table CSV")->required();
  fit->add_option("--threads", threads, "worker threads (default: hardware)");

  CLI::App* smo = app.add_subcommand("smooth", "fit the latent Gaussian pseudo model by MCMC");
  smo->add_option("--config", config_path, "run configuration (JSON)")->required();
  smo->add_option("--fits", fits_path, "fit table from maxfit")->required();
  smo->add_option("--out", out_path, "output directory")->required();
  smo->add_flag("--allow-exclusions", allow_exclusions,
                "proceed although maxfit excluded some sites");
  smo->add_option("--mesh-out", mesh_out, "also dump the mesh nodes (CSV)");

  CLI::App* ret = app.add_subcommand("returnlevels", "posterior return-level surfaces");
  ret->add_option("--config", config_path, "run configuration (JSON)")->required();
  ret->add_option("--fits", fits_path, "fit table from maxfit")->required();
  ret->add_option("--post", post_dir, "posterior directory from smooth")->required();
  ret->add_option("--out", out_path, "output CSV")->required();

  CLI::App* pre = app.add_subcommand("predict", "posterior predictive draws above the threshold");
  pre->add_option("--config", config_path, "run configuration (JSON)")->required();
  pre->add_option("--fits", fits_path, "fit table from maxfit")->required();
  pre->add_option("--post", post_dir, "posterior directory from smooth")->required();
  pre->add_option("--site", site_id, "site_id to predict at")->required();
  pre->add_option("--out", out_path, "output CSV")->required();
  add_seed(pre);

  CLI::App* var = app.add_subcommand("variogram", "binned empirical variogram of sitewise estimates");
  var->add_option("--fits", fits_path, "fit table from maxfit")->required();
  var->add_option("--param", param, "psi, tau or phi (default psi)");
  var->add_option("--bins", n_bins, "number of distance bins (default 15)");
  var->add_option("--max-dist", max_dist, "largest distance (default: half the domain diameter)");
  var->add_option("--out", out_path, "output CSV")->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(load_config(config_path), out_path, truth_path, seed_flag);
    if (fit->parsed()) return cmd_maxfit(load_config(config_path), data_path, out_path, threads);
    if (smo->parsed())
      return cmd_smooth(load_config(config_path), fits_path, out_path, allow_exclusions, mesh_out);
    if (ret->parsed()) return cmd_returnlevels(load_config(config_path), fits_path, post_dir, out_path);
    if (pre->parsed())
      return cmd_predict(load_config(config_path), fits_path, post_dir, site_id, out_path, seed_flag);
    if (var->parsed()) return cmd_variogram(fits_path, param, n_bins, max_dist, out_path);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace exlgm
