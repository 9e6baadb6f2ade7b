#pragma once

// Goodness-of-fit statistics against the uniform law on [0,1].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "coppit/error.hpp"

namespace coppit::stats {

// One-sample KS distance between the empirical CDF of `values` and U(0,1).
inline double ks_uniform_statistic(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("ks statistic of an empty sample");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - x[i], x[i] - lo});
  }
  return d;
}

namespace detail {

// Matrix power with decimal exponent tracking, as in Marsaglia, Tsang & Wang
// (2003), "Evaluating Kolmogorov's distribution".
inline void mat_mult(const std::vector<double>& a, const std::vector<double>& b,
                     std::vector<double>& c, std::size_t m) {
  std::fill(c.begin(), c.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = a[i * m + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i * m + j] += aik * b[k * m + j];
    }
}

inline void mat_power(const std::vector<double>& a, int ea, std::vector<double>& v, int& ev,
                      std::size_t m, int n) {
  if (n == 1) {
    v = a;
    ev = ea;
    return;
  }
  mat_power(a, ea, v, ev, m, n / 2);
  std::vector<double> b(m * m);
  mat_mult(v, v, b, m);
  int eb = 2 * ev;
  if (n % 2 == 0) {
    v = b;
    ev = eb;
  } else {
    mat_mult(a, b, v, m);
    ev = ea + eb;
  }
  if (v[(m / 2) * m + m / 2] > 1e140) {
    for (auto& x : v) x *= 1e-140;
    ev += 140;
  }
}

}  // namespace detail

// P(D_n < d) for the one-sample Kolmogorov statistic with continuous null.
// Exact matrix algorithm, with the published large-deviation shortcut when
// d^2 n is large enough that the p-value is below about 1e-6.
inline double kolmogorov_cdf(int n, double d) {
  if (n < 1) throw InvalidInput("kolmogorov_cdf: n < 1");
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const double s = d * d * n;
  if (s > 7.24 || (s > 3.76 && n > 99))
    return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(n) + 1.409 / n) * s);
  const int k = static_cast<int>(n * d) + 1;
  const std::size_t m = static_cast<std::size_t>(2 * k - 1);
  const double h = k - n * d;
  std::vector<double> H(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      H[i * m + j] = (static_cast<long>(i) - static_cast<long>(j) + 1 < 0) ? 0.0 : 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    H[i * m] -= std::pow(h, static_cast<double>(i + 1));
    H[(m - 1) * m + i] -= std::pow(h, static_cast<double>(m - i));
  }
  H[(m - 1) * m] += (2.0 * h - 1.0 > 0.0 ? std::pow(2.0 * h - 1.0, static_cast<double>(m)) : 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (static_cast<long>(i) - static_cast<long>(j) + 1 > 0)
        for (long g = 1; g <= static_cast<long>(i) - static_cast<long>(j) + 1; ++g)
          H[i * m + j] /= static_cast<double>(g);
  std::vector<double> Q;
  int eQ = 0;
  detail::mat_power(H, 0, Q, eQ, m, n);
  double p = Q[(k - 1) * m + (k - 1)];
  for (int i = 1; i <= n; ++i) {
    p = p * i / n;
    if (p < 1e-140) {
      p *= 1e140;
      eQ -= 140;
    }
  }
  p *= std::pow(10.0, eQ);
  return std::clamp(p, 0.0, 1.0);
}

inline double ks_uniform_pvalue(int n, double d) { return 1.0 - kolmogorov_cdf(n, d); }

// Asymptotic Kolmogorov survival Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct TwoSampleKs {
  double statistic = 0.0;
  double pvalue = 1.0;
};

// Two-sample KS with the Stephens small-sample correction to the asymptotic law.
inline TwoSampleKs ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("two-sample KS with an empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

inline double chi_square_quantile(double p, double df) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
}

inline double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(df), x));
}

}  // namespace coppit::stats
