#pragma once

// Univariate samplers on top of Rng. Every sampler consumes a fixed or
// rejection-determined number of words from the stream and nothing else, so
// results are pure functions of (stream state, parameters).

#include <cmath>
#include <limits>
#include <numbers>

#include "coppit/error.hpp"
#include "coppit/rng.hpp"
#include "coppit/special.hpp"

namespace coppit {

inline double uniform01(Rng& rng) noexcept { return rng.uniform01(); }

// Inversion through the AS241 quantile: exactly one word per draw.
inline double normal(Rng& rng, double mu = 0.0, double sigma = 1.0) {
  if (!(sigma > 0.0)) throw InvalidParameter("normal: sigma must be > 0");
  return mu + sigma * special::normal_quantile(rng.uniform_open());
}

inline double exponential(Rng& rng) noexcept { return -std::log(rng.uniform_open()); }

// Gamma(shape, 1): Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
inline double gamma(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw InvalidParameter("gamma: shape must be > 0");
  if (shape < 1.0) {
    const double g = gamma(rng, shape + 1.0);
    return g * std::exp(std::log(rng.uniform_open()) / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

namespace detail {

// Johnk (1964) for both shapes <= 1.
inline double beta_johnk(Rng& rng, double a, double b) {
  for (;;) {
    const double lx = std::log(rng.uniform_open()) / a;
    const double ly = std::log(rng.uniform_open()) / b;
    const double lsum = lx > ly ? lx + std::log1p(std::exp(ly - lx)) : ly + std::log1p(std::exp(lx - ly));
    if (lsum <= 0.0) {
      const double r = std::exp(lx - lsum);
      if (r > 0.0 && r < 1.0) return r;
    }
  }
}

// Cheng (1978) algorithms BB (min shape > 1) and BC (min shape <= 1).
inline double beta_cheng(Rng& rng, double aa, double bb) {
  constexpr double kLog4 = 1.3862943611198906;
  constexpr double kExpMax = std::numeric_limits<double>::max_exponent * std::numbers::ln2;
  const double a = std::min(aa, bb);
  const double b = std::max(aa, bb);
  const double alpha = a + b;
  double v = 0.0, w = 0.0;
  auto v_w = [&](double u1, double beta, double scale) {
    v = beta * std::log(u1 / (1.0 - u1));
    w = v <= kExpMax ? scale * std::exp(v) : std::numeric_limits<double>::max();
    if (std::isinf(w)) w = std::numeric_limits<double>::max();
  };

  if (a <= 1.0) {
    const double beta = 1.0 / a;
    const double delta = 1.0 + b - a;
    const double k1 = delta * (0.0138889 + 0.0416667 * a) / (b * beta - 0.777778);
    const double k2 = 0.25 + (0.5 + 0.25 / delta) * a;
    for (;;) {
      const double u1 = rng.uniform_open();
      const double u2 = rng.uniform_open();
      double z;
      if (u1 < 0.5) {
        const double y = u1 * u2;
        z = u1 * y;
        if (0.25 * u2 + z - y >= k1) continue;
      } else {
        z = u1 * u1 * u2;
        if (z <= 0.25) {
          v_w(u1, beta, b);
          break;
        }
        if (z >= k2) continue;
      }
      v_w(u1, beta, b);
      if (alpha * (std::log(alpha / (a + w)) + v) - kLog4 >= std::log(z)) break;
    }
    return aa == a ? a / (a + w) : w / (a + w);
  }

  const double beta = std::sqrt((alpha - 2.0) / (2.0 * a * b - alpha));
  const double gam = a + 1.0 / beta;
  double r, t = 0.0;
  do {
    const double u1 = rng.uniform_open();
    const double u2 = rng.uniform_open();
    v_w(u1, beta, a);
    const double z = u1 * u1 * u2;
    r = gam * v - kLog4;
    const double s = a + r - w;
    if (s + 2.609438 >= 5.0 * z) break;
    t = std::log(z);
    if (s > t) break;
  } while (r + alpha * std::log(alpha / (b + w)) < t);
  return aa != a ? b / (b + w) : w / (b + w);
}

}  // namespace detail

inline double beta(Rng& rng, double alpha, double betaP) {
  if (!(alpha > 0.0) || !(betaP > 0.0)) throw InvalidParameter("beta: shapes must be > 0");
  if (alpha <= 1.0 && betaP <= 1.0) return detail::beta_johnk(rng, alpha, betaP);
  return detail::beta_cheng(rng, alpha, betaP);
}

// Positive alpha-stable variable S with E exp(-tS) = exp(-t^alpha), via
// Kanter's representation of the Chambers-Mallows-Stuck construction.
inline double positive_stable(Rng& rng, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidParameter("positive_stable: alpha must be in (0,1]");
  if (alpha == 1.0) return 1.0;
  const double u = std::numbers::pi * rng.uniform_open();
  const double e = exponential(rng);
  const double ia = 1.0 / alpha;
  // sin(alpha u) / sin(u)^{1/alpha} * (sin((1-alpha) u) / e)^{(1-alpha)/alpha}, in logs.
  const double log_s = std::log(std::sin(alpha * u)) - ia * std::log(std::sin(u)) +
                       (1.0 - alpha) * ia * (std::log(std::sin((1.0 - alpha) * u)) - std::log(e));
  return std::exp(log_s);
}

// Logarithmic series law pr(k) = -p^k / (k log(1-p)), Kemp's (1981) LK algorithm.
// The _log1m form takes log(1-p) directly, for p that rounds to 1 in double
// (Frank frailty with large theta has log(1-p) = -theta).
inline double log_series_log1m(Rng& rng, double log1m_p) {
  if (!(log1m_p < 0.0) || std::isinf(log1m_p)) throw InvalidParameter("log_series: p must be in (0,1)");
  const double p = -std::expm1(log1m_p);
  const double v = rng.uniform_open();
  if (v >= p) return 1.0;
  const double u = rng.uniform_open();
  const double q = -std::expm1(log1m_p * u);
  if (v <= q * q) {
    const double x = std::floor(1.0 + std::log(v) / std::log(q));
    return std::isfinite(x) ? x : std::numeric_limits<double>::max();
  }
  return v > q ? 1.0 : 2.0;
}

inline double log_series(Rng& rng, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("log_series: p must be in (0,1)");
  return log_series_log1m(rng, std::log1p(-p));
}

// Sibuya(alpha): pr(k) = (-1)^{k+1} binom(alpha, k), so pr(X > k) = 1/(k B(k, 1-alpha)).
// Inversion after Hofert (2011): the quantile is floor or ceil of the asymptotic inverse.
inline double sibuya(Rng& rng, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidParameter("sibuya: alpha must be in (0,1]");
  if (alpha == 1.0) return 1.0;
  const double u = rng.uniform_open();
  if (u <= alpha) return 1.0;
  const double x_max = 1.0 / std::numeric_limits<double>::epsilon();
  const double g_inv = std::exp(-(std::log1p(-u) + std::lgamma(1.0 - alpha)) / alpha);
  const double f = std::floor(g_inv);
  if (!std::isfinite(g_inv)) return std::numeric_limits<double>::max();
  if (g_inv > x_max) return f;
  // log of 1/(f B(f, 1-alpha))
  const double log_tail = -(std::log(f) + std::lgamma(f) + std::lgamma(1.0 - alpha) -
                            std::lgamma(f + 1.0 - alpha));
  if (std::log1p(-u) < log_tail) return std::ceil(g_inv);
  return f;
}

}  // namespace coppit
