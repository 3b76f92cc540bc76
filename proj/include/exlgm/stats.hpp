#pragma once

#include <span>
#include <vector>

namespace exlgm {

/// Empirical quantile with type-7 interpolation (linear between order
/// statistics). Requires a nonempty sample and q in [0, 1].
double quantile_type7(std::span<const double> values, double q);

double mean(std::span<const double> values);
double sample_sd(std::span<const double> values);

/// Summary of a draw vector: mean, sd, and type-7 percentiles.
struct DrawSummary {
  double mean;
  double sd;
  double q025;
  double q50;
  double q975;
};
DrawSummary summarize_draws(std::span<const double> draws);

}  // namespace exlgm
