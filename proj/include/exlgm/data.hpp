#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace exlgm {

/// Gridded or station data in site-major layout. No missing values: every
/// site carries the same number T of replicates, all finite and nonnegative.
struct Dataset {
  struct Site {
    std::int64_t site_id;
    double lon;
    double lat;
  };
  std::vector<Site> sites;   ///< order of first appearance in the source file
  Eigen::MatrixXd values;    ///< N x T

  std::int64_t n_sites() const { return static_cast<std::int64_t>(sites.size()); }
  std::int64_t n_times() const { return values.cols(); }

  /// Throws invalid_input when an invariant is broken.
  void validate() const;
};

/// Reads the long-format CSV contract:
/// header `site_id,lon,lat,time_index,value`, 0-based consecutive time
/// indices per site, UTF-8, LF line endings. Errors carry the line number.
Dataset load_dataset(const std::string& path);

/// Writes the canonical form of the contract above: sites in stored order,
/// time_index ascending, numbers with 17 significant digits, LF endings.
/// load_dataset(write_dataset(d)) reproduces the file byte for byte.
void write_dataset(const Dataset& d, const std::string& path);

}  // namespace exlgm
