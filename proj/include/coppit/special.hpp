#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "coppit/error.hpp"

namespace coppit::special {

inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Wichura's AS241 (PPND16), relative accuracy about 1e-16.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -HUGE_VAL;
    if (p == 1.0) return HUGE_VAL;
    throw DomainError("normal_quantile: p outside [0,1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
// on P_n. Nodes are returned in increasing order.
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    constexpr std::size_t half = (N + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= N; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = pk;
        }
        dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[i] = -x;
      nodes[N - 1 - i] = x;
      weights[i] = w;
      weights[N - 1 - i] = w;
    }
  }

  static const GaussLegendre& get() {
    static const GaussLegendre rule;
    return rule;
  }
};

namespace detail {

template <std::size_t N>
double bvn_upper_impl(double h, double k, double r) {
  const auto& gl = GaussLegendre<N>::get();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double hk = h * k;
  double bvn = 0.0;
  if (std::fabs(r) < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    for (std::size_t i = 0; i < N; ++i) {
      const double sn = std::sin(0.5 * asr * (gl.nodes[i] + 1.0));
      bvn += gl.weights[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    // The full rule on [-1,1] integrates over asr/2 * (x+1); weights sum to 2.
    bvn = bvn * asr / (2.0 * two_pi) + normal_cdf(-h) * normal_cdf(-k);
    return bvn;
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::fabs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double xs = (a * (gl.nodes[i] + 1.0)) * (a * (gl.nodes[i] + 1.0));
      const double rs = std::sqrt(1.0 - xs);
      const double asr = -(bs / xs + hk) / 2.0;
      if (asr > -100.0) {
        bvn += a * gl.weights[i] * std::exp(asr) *
               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                (1.0 + c * xs * (1.0 + d * xs)));
      }
    }
    bvn = -bvn / two_pi;
  }
  if (r > 0.0) {
    bvn += normal_cdf(-std::max(h, k));
  } else {
    bvn = -bvn;
    if (k > h) {
      if (h < 0.0) {
        bvn += normal_cdf(k) - normal_cdf(h);
      } else {
        bvn += normal_cdf(-h) - normal_cdf(-k);
      }
    }
  }
  return bvn;
}

}  // namespace detail

// P(X > h, Y > k) for standard bivariate normal with correlation r.
// Drezner-Wesolowsky reduction to a single integral, evaluated as in Genz
// (2004) with fixed 6/12/20-node Gauss-Legendre rules by |r|.
inline double bivariate_normal_upper(double h, double k, double r) {
  if (!(r >= -1.0 && r <= 1.0)) throw DomainError("bivariate normal: |r| > 1");
  if (std::isinf(h) || std::isinf(k)) {
    if (h == HUGE_VAL || k == HUGE_VAL) return 0.0;
    if (h == -HUGE_VAL) return normal_cdf(-k);
    return normal_cdf(-h);
  }
  double v;
  const double ar = std::fabs(r);
  if (ar < 0.3) {
    v = detail::bvn_upper_impl<6>(h, k, r);
  } else if (ar < 0.75) {
    v = detail::bvn_upper_impl<12>(h, k, r);
  } else {
    v = detail::bvn_upper_impl<20>(h, k, r);
  }
  return std::clamp(v, 0.0, 1.0);
}

// P(X <= h, Y <= k) for standard bivariate normal with correlation r.
inline double bivariate_normal_cdf(double h, double k, double r) {
  return bivariate_normal_upper(-h, -k, r);
}

// First Debye function D1(x) = (1/x) * integral_0^x t/(e^t - 1) dt, x > 0,
// by adaptive Gauss-Kronrod with absolute tolerance 1e-10 on the integral.
inline double debye1(double x) {
  if (x == 0.0) return 1.0;
  const double ax = std::fabs(x);
  auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      integrand, 0.0, ax, 20, 1e-14, &error);
  if (error > 1e-10) throw NumericError("debye1: quadrature did not reach 1e-10");
  double d = integral / ax;
  // D1(-x) = D1(x) + x/2
  if (x < 0.0) d += ax / 2.0;
  return d;
}

}  // namespace coppit::special
