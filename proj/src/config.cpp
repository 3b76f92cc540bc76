#include "exlgm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "exlgm/errors.hpp"

namespace exlgm {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw invalid_input(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw invalid_input(where + ": unknown key '" + key + "'");
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number()) throw invalid_input(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

HyperParameters parse_theta(const json& j, const std::string& where) {
  require_keys(j, {"sigma_psi", "s_psi", "rho_psi", "sigma_tau", "s_tau", "rho_tau", "sigma_phi"},
               where);
  HyperParameters t;
  t.sigma_psi = get_number(j, "sigma_psi", where);
  t.s_psi = get_number(j, "s_psi", where);
  t.rho_psi = get_number(j, "rho_psi", where);
  t.sigma_tau = get_number(j, "sigma_tau", where);
  t.s_tau = get_number(j, "s_tau", where);
  t.rho_tau = get_number(j, "rho_tau", where);
  t.sigma_phi = get_number(j, "sigma_phi", where);
  t.validate();
  return t;
}

MeshConfig parse_mesh(const json& j) {
  require_keys(j, {"spacing", "margin", "bbox"}, "mesh");
  MeshConfig m;
  m.spacing = get_number(j, "spacing", "mesh");
  if (!(m.spacing > 0.0)) throw invalid_input("mesh.spacing must be positive");
  if (j.contains("margin")) {
    m.margin = get_number(j, "margin", "mesh");
    if (!(*m.margin >= 0.0)) throw invalid_input("mesh.margin must be nonnegative");
  }
  if (j.contains("bbox")) {
    const auto& b = j.at("bbox");
    if (!b.is_array() || b.size() != 4) throw invalid_input("mesh.bbox: expected [x0, y0, x1, y1]");
    m.bbox = BoundingBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                         b[3].get<double>()};
  }
  return m;
}

PriorConfig parse_priors(const json& j) {
  require_keys(j,
               {"lambda_sigma_psi", "lambda_sigma_tau", "lambda_sigma_phi", "lambda_s_psi",
                "lambda_rho_psi", "lambda_s_tau", "lambda_rho_tau", "sigma_beta_sq"},
               "priors");
  PriorConfig p;
  p.lambda_sigma_psi = get_number(j, "lambda_sigma_psi", "priors");
  p.lambda_sigma_tau = get_number(j, "lambda_sigma_tau", "priors");
  p.lambda_sigma_phi = get_number(j, "lambda_sigma_phi", "priors");
  p.lambda_s_psi = get_number(j, "lambda_s_psi", "priors");
  p.lambda_rho_psi = get_number(j, "lambda_rho_psi", "priors");
  p.lambda_s_tau = get_number(j, "lambda_s_tau", "priors");
  p.lambda_rho_tau = get_number(j, "lambda_rho_tau", "priors");
  if (j.contains("sigma_beta_sq")) p.sigma_beta_sq = get_number(j, "sigma_beta_sq", "priors");
  p.validate();
  return p;
}

ChainConfig parse_chain(const json& j) {
  require_keys(j, {"n_iterations", "n_burnin", "thin", "seed", "proposal_scales", "adapt"},
               "chain");
  ChainConfig c;
  if (j.contains("n_iterations")) c.n_iterations = j.at("n_iterations").get<int>();
  if (j.contains("n_burnin")) c.n_burnin = j.at("n_burnin").get<int>();
  if (j.contains("thin")) c.thin = j.at("thin").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("adapt")) c.adapt = j.at("adapt").get<bool>();
  if (j.contains("proposal_scales")) {
    const auto& a = j.at("proposal_scales");
    if (!a.is_array() || a.size() != 7)
      throw invalid_input("chain.proposal_scales: expected 7 numbers");
    for (int k = 0; k < 7; ++k)
      c.proposal_scales[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)].get<double>();
  }
  c.validate();
  return c;
}

SimulateConfig parse_simulate(const json& j) {
  require_keys(j, {"mode", "grid", "T", "block_size", "seed", "fixed", "generative"}, "simulate");
  SimulateConfig s;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "fixed")
    s.mode = SimulateConfig::Mode::fixed;
  else if (mode == "generative")
    s.mode = SimulateConfig::Mode::generative;
  else
    throw invalid_input("simulate.mode must be 'fixed' or 'generative'");

  const auto& g = j.at("grid");
  require_keys(g, {"nx", "ny", "spacing", "origin"}, "simulate.grid");
  s.grid.nx = g.at("nx").get<int>();
  s.grid.ny = g.at("ny").get<int>();
  if (s.grid.nx < 1 || s.grid.ny < 1) throw invalid_input("simulate.grid: nx, ny must be >= 1");
  if (g.contains("spacing")) s.grid.spacing = g.at("spacing").get<double>();
  if (g.contains("origin")) {
    const auto& o = g.at("origin");
    if (!o.is_array() || o.size() != 2) throw invalid_input("simulate.grid.origin: expected [x, y]");
    s.grid.origin_x = o[0].get<double>();
    s.grid.origin_y = o[1].get<double>();
  }
  s.T = j.at("T").get<std::int64_t>();
  if (s.T < 1) throw invalid_input("simulate.T must be at least 1");
  if (j.contains("block_size")) s.block_size = get_number(j, "block_size", "simulate");
  if (!(s.block_size > 0.0)) throw invalid_input("simulate.block_size must be positive");
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("fixed")) {
    const auto& f = j.at("fixed");
    require_keys(f, {"mu", "sigma", "xi"}, "simulate.fixed");
    s.fixed = PPParameters{get_number(f, "mu", "simulate.fixed"),
                           get_number(f, "sigma", "simulate.fixed"),
                           get_number(f, "xi", "simulate.fixed")};
  }
  if (j.contains("generative")) {
    const auto& g2 = j.at("generative");
    require_keys(g2, {"theta", "beta_psi", "beta_tau", "beta_phi"}, "simulate.generative");
    GenerativeTruth t;
    t.theta = parse_theta(g2.at("theta"), "simulate.generative.theta");
    t.beta_psi = get_number(g2, "beta_psi", "simulate.generative");
    t.beta_tau = get_number(g2, "beta_tau", "simulate.generative");
    t.beta_phi = get_number(g2, "beta_phi", "simulate.generative");
    s.generative = t;
  }
  if (s.mode == SimulateConfig::Mode::fixed && !s.fixed)
    throw invalid_input("simulate.mode 'fixed' requires a 'fixed' block");
  if (s.mode == SimulateConfig::Mode::generative && !s.generative)
    throw invalid_input("simulate.mode 'generative' requires a 'generative' block");
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw invalid_input(origin + ": " + e.what());
  }
  require_keys(j,
               {"threshold_quantile", "n_block", "min_exceedances", "mesh", "priors", "chain",
                "return_periods", "predict", "simulate", "paths"},
               "config");
  RunConfig c;
  if (j.contains("threshold_quantile")) {
    c.threshold_quantile = get_number(j, "threshold_quantile", "config");
    if (!(c.threshold_quantile > 0.0 && c.threshold_quantile < 1.0))
      throw invalid_input("threshold_quantile must lie in (0, 1)");
  }
  if (j.contains("n_block")) {
    c.n_block = get_number(j, "n_block", "config");
    if (!(*c.n_block > 0.0)) throw invalid_input("n_block must be positive");
  }
  if (j.contains("min_exceedances")) {
    c.min_exceedances = j.at("min_exceedances").get<int>();
    if (c.min_exceedances < 1) throw invalid_input("min_exceedances must be at least 1");
  }
  if (j.contains("mesh")) c.mesh = parse_mesh(j.at("mesh"));
  if (j.contains("priors")) c.priors = parse_priors(j.at("priors"));
  if (j.contains("chain")) c.chain = parse_chain(j.at("chain"));
  if (j.contains("return_periods")) {
    c.return_periods.clear();
    for (const auto& v : j.at("return_periods")) {
      const double M = v.get<double>();
      if (!(M > 1.0)) throw invalid_input("return periods must exceed 1");
      c.return_periods.push_back(M);
    }
    if (c.return_periods.empty()) throw invalid_input("return_periods must be nonempty");
  }
  if (j.contains("predict")) {
    const auto& p = j.at("predict");
    require_keys(p, {"block_size", "n_draws"}, "predict");
    if (p.contains("block_size")) c.predict.block_size = get_number(p, "block_size", "predict");
    if (p.contains("n_draws")) c.predict.n_draws = p.at("n_draws").get<int>();
    if (!(c.predict.block_size > 0.0) || c.predict.n_draws < 1)
      throw invalid_input("predict: block_size must be positive and n_draws >= 1");
  }
  if (j.contains("simulate")) c.simulate = parse_simulate(j.at("simulate"));
  if (j.contains("paths")) {
    if (!j.at("paths").is_object()) throw invalid_input("paths: expected an object");
    for (const auto& [key, val] : j.at("paths").items()) {
      if (!val.is_string()) throw invalid_input("paths." + key + ": expected a string");
      c.paths[key] = val.get<std::string>();
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace exlgm
