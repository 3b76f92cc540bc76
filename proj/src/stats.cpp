#include "exlgm/stats.hpp"

#include <algorithm>
#include <cmath>

#include "exlgm/errors.hpp"

namespace exlgm {

double quantile_type7(std::span<const double> values, double q) {
  if (values.empty()) throw invalid_input("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw invalid_input("quantile level outside [0, 1]");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  if (n == 1) return x[0];
  const double pos = (static_cast<double>(n) - 1.0) * q;
  const std::size_t lo = std::min(static_cast<std::size_t>(pos), n - 2);
  const double frac = pos - static_cast<double>(lo);
  return x[lo] + frac * (x[lo + 1] - x[lo]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw invalid_input("mean of an empty sample");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) throw invalid_input("sd needs at least two values");
  const double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(values.size() - 1));
}

DrawSummary summarize_draws(std::span<const double> draws) {
  return {mean(draws), sample_sd(draws), quantile_type7(draws, 0.025),
          quantile_type7(draws, 0.5), quantile_type7(draws, 0.975)};
}

}  // namespace exlgm
