#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace test_support {

// one-sample Kolmogorov-Smirnov statistic against a cdf
inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// asymptotic p-value of the KS statistic (Kolmogorov distribution tail)
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    p += sign * 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    sign = -sign;
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double ks_test_pvalue(std::vector<double> x, const std::function<double(double)>& cdf) {
  const std::size_t n = x.size();
  return ks_pvalue(ks_statistic(std::move(x), cdf), n);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// adaptive Simpson quadrature
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int depth = 40) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double t, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double flm = f(lmid), frm = f(rmid);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    const double delta = left + right - whole;
    if (d <= 0 || std::abs(delta) < 15.0 * t) return left + right + delta / 15.0;
    return rec(lo, mid, flo, flm, fmid, 0.5 * t, d - 1) +
           rec(mid, hi, fmid, frm, fhi, 0.5 * t, d - 1);
  };
  return rec(a, b, f(a), f(0.5 * (a + b)), f(b), tol, depth);
}

}  // namespace test_support
