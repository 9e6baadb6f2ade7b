#pragma once

// Archimedean copulas C(u) = psi(sum_i phi(u_i)) for the independence,
// Gumbel, Frank, Joe and Clayton families.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coppit/error.hpp"
#include "coppit/rng.hpp"
#include "coppit/samplers.hpp"
#include "coppit/special.hpp"

namespace coppit {

enum class Family { Independence, Gumbel, Frank, Joe, Clayton };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::Independence: return "independence";
    case Family::Gumbel: return "gumbel";
    case Family::Frank: return "frank";
    case Family::Joe: return "joe";
    case Family::Clayton: return "clayton";
  }
  return "?";
}

inline Family family_from_string(std::string_view s) {
  if (s == "independence") return Family::Independence;
  if (s == "gumbel") return Family::Gumbel;
  if (s == "frank") return Family::Frank;
  if (s == "joe") return Family::Joe;
  if (s == "clayton") return Family::Clayton;
  throw InvalidParameter("unknown copula family '" + std::string(s) + "'");
}

// Kendall's tau as a function of the parameter.
inline double theta_to_tau(Family family, double theta) {
  switch (family) {
    case Family::Independence:
      return 0.0;
    case Family::Gumbel:
      if (!(theta >= 1.0)) throw InvalidParameter("gumbel: theta must be >= 1");
      return 1.0 - 1.0 / theta;
    case Family::Clayton:
      if (!(theta > 0.0)) throw InvalidParameter("clayton: theta must be > 0");
      return theta / (theta + 2.0);
    case Family::Frank:
      if (!(theta > 0.0)) throw InvalidParameter("frank: theta must be > 0");
      // Small theta: tau = theta/9 - theta^3/900 + O(theta^5) avoids cancellation.
      if (theta < 1e-4) return theta / 9.0 - theta * theta * theta / 900.0;
      return 1.0 - 4.0 * (1.0 - special::debye1(theta)) / theta;
    case Family::Joe: {
      if (!(theta >= 1.0)) throw InvalidParameter("joe: theta must be >= 1");
      // tau = 1 - 4 sum_k 1/(k (theta k + 2)(theta (k-1) + 2)), truncated when a
      // term drops below 1e-12, plus the integral estimate of the remaining tail.
      double sum = 0.0;
      double k = 1.0;
      for (;; k += 1.0) {
        const double term = 1.0 / (k * (theta * k + 2.0) * (theta * (k - 1.0) + 2.0));
        sum += term;
        if (term < 1e-12) break;
      }
      sum += 1.0 / (2.0 * theta * theta * (k + 0.5) * (k + 0.5));
      return 1.0 - 4.0 * sum;
    }
  }
  return 0.0;
}

namespace detail {

inline double frank_tau_derivative(double theta) {
  // d tau / d theta = 4/theta^2 + 4/(theta (e^theta - 1)) - 8 D1/theta^2
  const double d1 = special::debye1(theta);
  return 4.0 / (theta * theta) + 4.0 / (theta * std::expm1(theta)) - 8.0 * d1 / (theta * theta);
}

// Bisection on a monotone increasing tau(theta) followed by a Newton polish.
template <typename TauFn, typename DerivFn>
double invert_tau(TauFn tau_of, DerivFn deriv, double tau, double lo, double hi, const char* name) {
  double flo = tau_of(lo) - tau, fhi = tau_of(hi) - tau;
  if (flo > 0.0 || fhi < 0.0)
    throw NumericError(std::string(name) + ": tau " + std::to_string(tau) +
                       " not bracketed by theta in [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = tau_of(mid) - tau;
    if (fm == 0.0) return mid;
    if (fm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double theta = 0.5 * (lo + hi);
  double res = tau_of(theta) - tau;
  for (int it = 0; it < 3; ++it) {
    const double d = deriv(theta);
    if (!(d > 0.0)) break;
    const double cand = theta - res / d;
    if (!(cand > 0.0)) break;
    const double cres = tau_of(cand) - tau;
    if (std::fabs(cres) >= std::fabs(res)) break;
    theta = cand;
    res = cres;
  }
  if (std::fabs(res) > 1e-10)
    throw NumericError(std::string(name) + ": tau inversion residual " + std::to_string(res));
  return theta;
}

}  // namespace detail

inline double tau_to_theta(Family family, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidParameter("tau must lie in (0,1)");
  switch (family) {
    case Family::Independence:
      throw InvalidParameter("independence copula has no tau parameterization");
    case Family::Gumbel:
      return 1.0 / (1.0 - tau);
    case Family::Clayton:
      return 2.0 * tau / (1.0 - tau);
    case Family::Frank:
      return detail::invert_tau([](double t) { return theta_to_tau(Family::Frank, t); },
                                detail::frank_tau_derivative, tau, 1e-6, 1e3, "frank");
    case Family::Joe: {
      auto f = [](double t) { return theta_to_tau(Family::Joe, t); };
      auto df = [&](double t) {
        const double h = 1e-6 * std::max(1.0, t);
        return (f(t + h) - f(std::max(1.0, t - h))) / (t + h - std::max(1.0, t - h));
      };
      return detail::invert_tau(f, df, tau, 1.0, 1e4, "joe");
    }
  }
  return 0.0;
}

class ArchimedeanCopula {
 public:
  ArchimedeanCopula(Family family, double theta, std::size_t dim)
      : family_(family), theta_(family == Family::Independence ? 1.0 : theta), dim_(dim) {
    if (dim < 2) throw InvalidParameter("copula dimension must be >= 2");
    switch (family) {
      case Family::Independence:
        break;
      case Family::Gumbel:
      case Family::Joe:
        if (!(theta >= 1.0) || !std::isfinite(theta))
          throw InvalidParameter(std::string(to_string(family)) + ": theta must be >= 1");
        break;
      case Family::Frank:
      case Family::Clayton:
        if (!(theta > 0.0) || !std::isfinite(theta))
          throw InvalidParameter(std::string(to_string(family)) + ": theta must be > 0");
        break;
    }
    if (family == Family::Frank) neg_expm1_theta_ = std::expm1(-theta_);
  }

  static ArchimedeanCopula from_tau(Family family, double tau, std::size_t dim) {
    if (family == Family::Independence) return {family, 1.0, dim};
    return {family, tau_to_theta(family, tau), dim};
  }

  Family family() const noexcept { return family_; }
  double theta() const noexcept { return theta_; }
  std::size_t dim() const noexcept { return dim_; }
  double tau() const { return theta_to_tau(family_, theta_); }

  bool operator==(const ArchimedeanCopula&) const = default;

  // Generator phi on (0,1]; phi(1) = 0, strictly decreasing.
  double generator(double t) const {
    check_unit_open(t);
    return phi(t);
  }

  double generator_deriv(double t) const {
    check_unit_open(t);
    const double th = theta_;
    switch (family_) {
      case Family::Independence: return -1.0 / t;
      case Family::Gumbel: return -th * std::pow(-std::log(t), th - 1.0) / t;
      case Family::Frank: return -th / std::expm1(th * t);
      case Family::Joe: {
        const double x = std::pow(1.0 - t, th);
        return -th * std::pow(1.0 - t, th - 1.0) / (1.0 - x);
      }
      case Family::Clayton: return -std::pow(t, -th - 1.0);
    }
    return 0.0;
  }

  // Inverse generator psi on [0, inf]; psi(0) = 1, psi(inf) = 0.
  double inverse_generator(double s) const {
    if (!(s >= 0.0)) throw DomainError("inverse generator needs s >= 0");
    return psi(s);
  }

  double cdf(std::span<const double> u) const {
    if (u.size() != dim_) throw DimensionMismatch(dim_, u.size());
    double s = 0.0;
    for (double ui : u) {
      if (!(ui >= 0.0 && ui <= 1.0)) throw DomainError("copula cdf: coordinate outside [0,1]");
      if (ui == 0.0) return 0.0;
      if (ui < 1.0) s += phi(ui);
    }
    return std::clamp(psi(s), 0.0, 1.0);
  }

  // Probability of the orthant {V : V_i >= u_i if signs[i] > 0, V_i <= u_i
  // otherwise} by inclusion-exclusion over the upper coordinates.
  double orthant_cdf(std::span<const double> u, std::span<const int> signs) const {
    if (u.size() != dim_) throw DimensionMismatch(dim_, u.size());
    if (signs.size() != dim_) throw DimensionMismatch(dim_, signs.size());
    std::vector<std::size_t> up;
    for (std::size_t i = 0; i < dim_; ++i)
      if (signs[i] > 0) up.push_back(i);
    if (up.empty()) return cdf(u);
    if (up.size() > 24) throw Unsupported("orthant_cdf: more than 24 upper coordinates");
    std::vector<double> w(u.begin(), u.end());
    double total = 0.0;
    const std::size_t subsets = std::size_t{1} << up.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      int bits = 0;
      for (std::size_t b = 0; b < up.size(); ++b) {
        // Coordinates in the subset stay at u (subtracted), the rest go to 1.
        if (mask & (std::size_t{1} << b)) {
          w[up[b]] = u[up[b]];
          ++bits;
        } else {
          w[up[b]] = 1.0;
        }
      }
      const double c = cdf(w);
      total += (bits % 2 == 0) ? c : -c;
    }
    return std::clamp(total, 0.0, 1.0);
  }

  // n draws via the Marshall-Olkin frailty construction U_i = psi(E_i / V).
  std::vector<std::vector<double>> sample(Rng& rng, std::size_t n) const {
    std::vector<std::vector<double>> out(n, std::vector<double>(dim_));
    for (auto& row : out) sample_into(rng, row);
    return out;
  }

  void sample_into(Rng& rng, std::span<double> row) const {
    if (row.size() != dim_) throw DimensionMismatch(dim_, row.size());
    if (family_ == Family::Independence) {
      for (double& x : row) x = rng.uniform01();
      return;
    }
    const double v = frailty(rng);
    for (double& x : row) x = frailty_psi(exponential(rng) / v);
  }

  // Bivariate Kendall function K(w) = w - phi(w)/phi'(w).
  double kendall_cdf_bivariate(double w) const {
    if (dim_ != 2) throw Unsupported("closed-form Kendall function needs dim = 2");
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("kendall: w outside [0,1]");
    if (w == 0.0) return 0.0;
    if (w == 1.0) return 1.0;
    const double th = theta_;
    double k = w;
    switch (family_) {
      case Family::Independence:
        k = w - w * std::log(w);
        break;
      case Family::Gumbel:
        k = w - w * std::log(w) / th;
        break;
      case Family::Clayton:
        k = w + (w - std::pow(w, th + 1.0)) / th;
        break;
      case Family::Frank: {
        // phi(w) expm1(theta w) = L * P with phi = -log1p(r), L = log1p(r)/r,
        // P = -r expm1(theta w) = -expm1(-theta w) expm1(-theta (1-w)) / expm1(-theta).
        const double r = frank_r(w);
        const double L = r == 0.0 ? 1.0 : std::log1p(r) / r;
        const double P = -std::expm1(-th * w) * std::expm1(-th * (1.0 - w)) / neg_expm1_theta_;
        k = w + L * P / th;
        break;
      }
      case Family::Joe: {
        // phi(w)(1 - x) / (theta (1-w)^{theta-1}) with x = (1-w)^theta, written
        // as (1-w)(1-x) * (-log1p(-x)/x) / theta for stability near w = 1.
        const double x = std::pow(1.0 - w, th);
        const double ratio = x > 0.0 ? -std::log1p(-x) / x : 1.0;
        k = w + (1.0 - w) * (1.0 - x) * ratio / th;
        break;
      }
    }
    return std::clamp(k, w, 1.0);
  }

 private:
  static void check_unit_open(double t) {
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("generator argument outside (0,1]");
  }

  double phi(double t) const {
    const double th = theta_;
    switch (family_) {
      case Family::Independence: return -std::log(t);
      case Family::Gumbel: return std::pow(-std::log(t), th);
      case Family::Frank: {
        const double ratio = std::expm1(-th * t) / neg_expm1_theta_;
        return ratio < 0.5 ? -std::log(ratio) : -std::log1p(frank_r(t));
      }
      case Family::Joe: return -std::log1p(-std::pow(1.0 - t, th));
      case Family::Clayton: return (std::pow(t, -th) - 1.0) / th;
    }
    return 0.0;
  }

  // expm1(-theta t)/expm1(-theta) - 1, without cancellation near t = 1.
  double frank_r(double t) const {
    return -std::exp(-theta_ * t) * std::expm1(-theta_ * (1.0 - t)) / neg_expm1_theta_;
  }

  double psi(double s) const {
    const double th = theta_;
    if (s == 0.0) return 1.0;
    if (std::isinf(s)) return 0.0;
    switch (family_) {
      case Family::Independence: return std::exp(-s);
      case Family::Gumbel: return std::exp(-std::pow(s, 1.0 / th));
      case Family::Frank: {
        // log(1 + e^-s expm1(-theta)) = log(-expm1(-s) + e^{-s-theta}) when the
        // first form would cancel
        const double a = std::exp(-s) * neg_expm1_theta_;
        if (a > -0.5) return -std::log1p(a) / th;
        return -std::log(-std::expm1(-s) + std::exp(-s - th)) / th;
      }
      case Family::Joe: return -std::expm1(std::log(-std::expm1(-s)) / th);
      case Family::Clayton: return std::pow(1.0 + th * s, -1.0 / th);
    }
    return 0.0;
  }

  // Frailty V with Laplace transform equal to frailty_psi.
  double frailty(Rng& rng) const {
    switch (family_) {
      case Family::Independence: return 1.0;
      case Family::Gumbel: return positive_stable(rng, 1.0 / theta_);
      case Family::Frank: return log_series_log1m(rng, -theta_);
      case Family::Joe: return sibuya(rng, 1.0 / theta_);
      case Family::Clayton: return gamma(rng, 1.0 / theta_);
    }
    return 1.0;
  }

  // Laplace transform of the frailty law. Equals psi except for Clayton,
  // whose generator carries a 1/theta scale: psi(s) = frailty_psi(theta s).
  double frailty_psi(double s) const {
    if (family_ == Family::Clayton) return std::pow(1.0 + s, -1.0 / theta_);
    return psi(s);
  }

  Family family_;
  double theta_;
  std::size_t dim_;
  double neg_expm1_theta_ = 0.0;  // expm1(-theta), Frank only
};

}  // namespace coppit
