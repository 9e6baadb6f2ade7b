#pragma once

// Kendall distribution functions K_H(w) = pr(H(X) <= w), X ~ H, with exact
// left limits K_H(w-).

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coppit/copula.hpp"
#include "coppit/error.hpp"
#include "coppit/forecast.hpp"
#include "coppit/rng.hpp"

namespace coppit {

inline constexpr std::size_t kDefaultKendallSamples = 10000;

enum class KendallStrategy { Auto, Analytic, MonteCarlo, Pseudo };

inline KendallStrategy kendall_strategy_from_string(std::string_view s) {
  if (s == "auto") return KendallStrategy::Auto;
  if (s == "analytic") return KendallStrategy::Analytic;
  if (s == "mc") return KendallStrategy::MonteCarlo;
  if (s == "pseudo") return KendallStrategy::Pseudo;
  throw InvalidParameter("kendall strategy must be auto, analytic, mc or pseudo");
}

class KendallFn {
 public:
  enum class Kind { Analytic, MonteCarlo, EmpiricalPseudo };

  // Closed form for a bivariate Archimedean copula.
  static KendallFn analytic(const ArchimedeanCopula& copula) {
    if (copula.dim() != 2) throw Unsupported("closed-form Kendall function needs a bivariate copula");
    KendallFn k(Kind::Analytic);
    k.copula_ = copula;
    return k;
  }

  // K(w) = w, the Kendall function of any continuous univariate law.
  static KendallFn uniform() { return KendallFn(Kind::Analytic); }

  // Step function over the given values: eval(w) = #{v <= w}/n.
  static KendallFn from_values(Kind kind, std::vector<double> values) {
    if (kind == Kind::Analytic) throw InvalidParameter("from_values needs an empirical kind");
    if (values.empty()) throw InvalidInput("Kendall function needs at least one value");
    for (double v : values)
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("Kendall values must lie in [0,1]");
    std::sort(values.begin(), values.end());
    KendallFn k(kind);
    k.values_ = std::move(values);
    return k;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_continuous() const noexcept { return kind_ == Kind::Analytic; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::optional<ArchimedeanCopula>& copula() const noexcept { return copula_; }

  double eval(double w) const {
    check(w);
    if (kind_ == Kind::Analytic) return copula_ ? copula_->kendall_cdf_bivariate(w) : w;
    const auto it = std::upper_bound(values_.begin(), values_.end(), w);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
  }

  double eval_left(double w) const {
    check(w);
    if (w == 0.0) return 0.0;
    if (kind_ == Kind::Analytic) return eval(w);
    const auto it = std::lower_bound(values_.begin(), values_.end(), w);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
  }

 private:
  explicit KendallFn(Kind kind) : kind_(kind) {}

  static void check(double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("Kendall function argument outside [0,1]");
  }

  Kind kind_;
  std::optional<ArchimedeanCopula> copula_;
  std::vector<double> values_;
};

// Whether a closed form exists for this forecast under this cone.
inline bool has_analytic_kendall(const Forecast& f, const OrthantCone& cone) {
  if (f.dim() == 1) return f.is_continuous();
  const auto* cm = f.copula_marginal();
  return cm && cm->copula.dim() == 2 && cone.is_lower();
}

inline KendallFn build_analytic(const ArchimedeanCopula& copula) { return KendallFn::analytic(copula); }

inline KendallFn build_analytic(const Forecast& f, const OrthantCone& cone) {
  if (!has_analytic_kendall(f, cone))
    throw Unsupported("no closed-form Kendall function for this forecast/cone");
  if (f.dim() == 1) return KendallFn::uniform();
  return KendallFn::analytic(f.copula_marginal()->copula);
}

inline KendallFn build_analytic(const Forecast& f) { return build_analytic(f, OrthantCone::lower(f.dim())); }

// Empirical CDF of h_i = H^E(x_i) over n draws x_i from H. Copula forecasts are
// sampled and evaluated on the unit cube, where H^E(x) = C^E(F(x)) exactly.
inline KendallFn build_monte_carlo(const Forecast& f, Rng& rng, std::size_t n, const OrthantCone& cone) {
  if (n == 0) throw InvalidParameter("Monte Carlo Kendall function needs n >= 1");
  if (cone.dim() != f.dim()) throw DimensionMismatch(f.dim(), cone.dim());
  std::vector<double> h(n);
  if (const auto* cm = f.copula_marginal()) {
    Point u(f.dim());
    const bool lower = cone.is_lower();
    for (double& hi : h) {
      cm->copula.sample_into(rng, u);
      hi = lower ? cm->copula.cdf(u) : cm->copula.orthant_cdf(u, cone.signs());
    }
  } else {
    const auto xs = f.sample(rng, n);
    const bool lower = cone.is_lower();
    for (std::size_t i = 0; i < n; ++i) h[i] = lower ? f.cdf(xs[i]) : f.orthant_cdf(cone, xs[i]);
  }
  return KendallFn::from_values(KendallFn::Kind::MonteCarlo, std::move(h));
}

inline KendallFn build_monte_carlo(const Forecast& f, Rng& rng, std::size_t n) {
  return build_monte_carlo(f, rng, n, OrthantCone::lower(f.dim()));
}

// Pseudo-observation of point k: the fraction of points coordinatewise <= x_k.
inline std::vector<double> pseudo_observations(std::span<const Point> points) {
  const std::size_t m = points.size();
  std::vector<double> w(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < m; ++j) c += precedes(points[j], points[k]) ? 1 : 0;
    w[k] = static_cast<double>(c) / static_cast<double>(m);
  }
  return w;
}

// Empirical Kendall function of a point set; for an ensemble forecast with
// these points it is the exact Kendall function.
inline KendallFn build_empirical_pseudo(std::span<const Point> points) {
  if (points.empty()) throw InvalidInput("empirical Kendall function of an empty point set");
  const std::size_t d = points.front().size();
  for (const auto& p : points)
    if (p.size() != d) throw DimensionMismatch(d, p.size());
  return KendallFn::from_values(KendallFn::Kind::EmpiricalPseudo, pseudo_observations(points));
}

// Strategy dispatch. Auto: closed form when available, pseudo-observations
// for ensembles, Monte Carlo otherwise. Cones other than all-lower reflect
// ensemble points, or evaluate the orthant CDF inside Monte Carlo.
inline KendallFn build_kendall(const Forecast& f, KendallStrategy strategy, Rng& rng, std::size_t n,
                               const OrthantCone& cone) {
  if (strategy == KendallStrategy::Auto) {
    if (has_analytic_kendall(f, cone)) strategy = KendallStrategy::Analytic;
    else if (f.is_ensemble()) strategy = KendallStrategy::Pseudo;
    else strategy = KendallStrategy::MonteCarlo;
  }
  switch (strategy) {
    case KendallStrategy::Analytic:
      return build_analytic(f, cone);
    case KendallStrategy::MonteCarlo:
      return build_monte_carlo(f, rng, n, cone);
    case KendallStrategy::Pseudo: {
      if (const auto* e = f.ensemble()) {
        if (cone.is_lower()) return build_empirical_pseudo(e->points());
        return build_empirical_pseudo(e->reflected(cone).points());
      }
      // Parametric forecast: pseudo-observations of an n-point sample.
      std::vector<Point> xs = f.sample(rng, n);
      if (!cone.is_lower())
        for (auto& x : xs) x = cone.reflect(x);
      return build_empirical_pseudo(xs);
    }
    case KendallStrategy::Auto:
      break;
  }
  throw InvalidParameter("unreachable Kendall strategy");
}

inline KendallFn build_kendall(const Forecast& f, KendallStrategy strategy, Rng& rng, std::size_t n) {
  return build_kendall(f, strategy, rng, n, OrthantCone::lower(f.dim()));
}

}  // namespace coppit
