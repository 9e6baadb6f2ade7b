#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

// Sample Kendall tau in O(n log n): count discordant pairs as inversions of
// y after sorting by x. Assumes no ties (continuous data).
inline double kendall_tau(std::vector<std::pair<double, double>> xy) {
  std::sort(xy.begin(), xy.end());
  std::vector<double> y(xy.size());
  for (std::size_t i = 0; i < xy.size(); ++i) y[i] = xy[i].second;
  std::vector<double> buf(y.size());
  long double inversions = 0;
  std::function<void(std::size_t, std::size_t)> sort_count = [&](std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return;
    const std::size_t mid = (lo + hi) / 2;
    sort_count(lo, mid);
    sort_count(mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
      if (y[i] <= y[j]) {
        buf[k++] = y[i++];
      } else {
        inversions += static_cast<long double>(mid - i);
        buf[k++] = y[j++];
      }
    }
    while (i < mid) buf[k++] = y[i++];
    while (j < hi) buf[k++] = y[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, y.begin() + lo);
  };
  sort_count(0, y.size());
  const long double n = static_cast<long double>(xy.size());
  const long double pairs = n * (n - 1) / 2;
  return static_cast<double>((pairs - 2 * inversions) / pairs);
}

inline double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Bivariate normal CDF by Plackett's identity:
//   Phi2(h,k;rho) = Phi(h)Phi(k) + int_0^rho phi2(h,k;r) dr,
// integrated with adaptive Gauss-Kronrod.
inline double bvn_cdf(double h, double k, double rho) {
  auto dens = [&](double r) {
    const double s = 1.0 - r * r;
    return std::exp(-(h * h - 2 * r * h * k + k * k) / (2 * s)) / (2 * std::numbers::pi * std::sqrt(s));
  };
  double err = 0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(dens, 0.0, rho, 15, 1e-13, &err);
  return phi(h) * phi(k) + integral;
}

// Pearson chi-square goodness of fit p-value for observed counts against
// expected probabilities (the last cell absorbs the remaining mass).
inline double chi_square_gof_pvalue(const std::vector<long long>& observed, const std::vector<double>& probs) {
  long long n = 0;
  for (auto o : observed) n += o;
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probs[i] * static_cast<double>(n);
    stat += (observed[i] - e) * (observed[i] - e) / e;
  }
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// One-sample KS distance against a continuous CDF.
inline double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Asymptotic 1% critical value of the KS distance for sample size n.
inline double ks_crit_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

// Sup distance between two CDFs on a uniform grid of [0,1].
inline double sup_grid(const std::function<double(double)>& f, const std::function<double(double)>& g,
                       int points = 1001) {
  double d = 0;
  for (int i = 0; i < points; ++i) {
    const double w = static_cast<double>(i) / (points - 1);
    d = std::max(d, std::abs(f(w) - g(w)));
  }
  return d;
}

}  // namespace oracle
