#pragma once

#include <string>
#include <vector>

#include "exlgm/posterior.hpp"
#include "exlgm/sitewise.hpp"
#include "exlgm/smoother.hpp"

namespace exlgm {

/// Sitewise fit table CSV: one row per included site, columns
/// site_id,lon,lat,threshold,n_exceedances,psi_hat,tau_hat,phi_hat,
/// q11,q12,q13,q22,q23,q33 (upper triangle of the observed information).
void write_fits_csv(const std::vector<SiteFit>& fits, const std::string& path);
std::vector<SiteFit> read_fits_csv(const std::string& path);

/// Exclusion sidecar CSV (site_id,reason), written next to the fit table.
void write_exclusions_csv(const std::vector<SiteExclusion>& exclusions, const std::string& path);
std::vector<SiteExclusion> read_exclusions_csv(const std::string& path);  ///< empty if absent

/// Hyperparameter draws CSV: header of the 7 names, 17 significant digits.
void write_theta_csv(const PosteriorSamples& samples, const std::string& path);

/// Latent draws, row-major float64 binary with an 8-byte magic and
/// int64 row/column counts ("EXLGMLD1").
void write_latent_bin(const PosteriorSamples& samples, const std::string& path);

/// Reads both draw files back into a PosteriorSamples (acceptance_rate and
/// seed are restored from the summary by the caller when needed).
PosteriorSamples read_posterior(const std::string& theta_csv, const std::string& latent_bin,
                                int n_sites, int n_mesh_nodes);

void write_return_levels_csv(const std::vector<ReturnLevelRow>& rows, const std::string& path);
void write_variogram_csv(const std::vector<VariogramBin>& bins, const std::string& path);
void write_predictive_csv(const std::vector<double>& draws, const std::string& path);
void write_mesh_csv(const LatticeMesh& mesh, const std::string& path);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

}  // namespace exlgm
