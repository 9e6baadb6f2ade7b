#pragma once

// Predictive distributions on R^d: copula with normal margins, multivariate
// Gaussian, and ensembles (equal-mass empirical measures).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "coppit/copula.hpp"
#include "coppit/error.hpp"
#include "coppit/rng.hpp"
#include "coppit/samplers.hpp"
#include "coppit/special.hpp"

namespace coppit {

using Point = std::vector<double>;

// x precedes y when x_l <= y_l in every coordinate.
inline bool precedes(std::span<const double> x, std::span<const double> y) noexcept {
  for (std::size_t l = 0; l < x.size(); ++l)
    if (!(x[l] <= y[l])) return false;
  return true;
}

struct NormalMargin {
  double mu = 0.0;
  double sigma = 1.0;

  NormalMargin() = default;
  NormalMargin(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu))
      throw InvalidParameter("normal margin needs finite mu and sigma > 0");
  }

  double cdf(double x) const noexcept { return special::normal_cdf((x - mu) / sigma); }
  double quantile(double p) const { return mu + sigma * special::normal_quantile(p); }
  bool operator==(const NormalMargin&) const = default;
};

// Sign +1 on coordinate i selects z_i >= y_i, sign -1 selects z_i <= y_i.
class OrthantCone {
 public:
  OrthantCone() = default;
  explicit OrthantCone(std::vector<int> signs) : signs_(std::move(signs)) {
    if (signs_.empty()) throw InvalidParameter("cone needs at least one coordinate");
    for (int s : signs_)
      if (s != 1 && s != -1) throw InvalidParameter("cone signs must be +1 or -1");
  }

  static OrthantCone lower(std::size_t d) { return OrthantCone(std::vector<int>(d, -1)); }
  static OrthantCone upper(std::size_t d) { return OrthantCone(std::vector<int>(d, 1)); }

  // "sw", "se", "ne", "nw" for d = 2, or a string of '+'/'-' of length d.
  static OrthantCone parse(std::string_view text) {
    if (text == "sw") return OrthantCone({-1, -1});
    if (text == "se") return OrthantCone({1, -1});
    if (text == "ne") return OrthantCone({1, 1});
    if (text == "nw") return OrthantCone({-1, 1});
    std::vector<int> s;
    for (char c : text) {
      if (c == '+') s.push_back(1);
      else if (c == '-') s.push_back(-1);
      else throw InvalidParameter("cone must be sw/se/ne/nw or a +/- string, got '" + std::string(text) + "'");
    }
    return OrthantCone(std::move(s));
  }

  std::string to_string() const {
    if (signs_.size() == 2) {
      if (signs_[0] < 0 && signs_[1] < 0) return "sw";
      if (signs_[0] > 0 && signs_[1] < 0) return "se";
      if (signs_[0] > 0 && signs_[1] > 0) return "ne";
      return "nw";
    }
    std::string s;
    for (int v : signs_) s.push_back(v > 0 ? '+' : '-');
    return s;
  }

  std::size_t dim() const noexcept { return signs_.size(); }
  const std::vector<int>& signs() const noexcept { return signs_; }
  int operator[](std::size_t i) const { return signs_.at(i); }
  bool is_lower() const noexcept {
    return std::all_of(signs_.begin(), signs_.end(), [](int s) { return s < 0; });
  }

  // Negate the coordinates on which the cone points upward.
  Point reflect(std::span<const double> x) const {
    if (x.size() != signs_.size()) throw DimensionMismatch(signs_.size(), x.size());
    Point out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i)
      if (signs_[i] > 0) out[i] = -out[i];
    return out;
  }

  bool operator==(const OrthantCone&) const = default;

 private:
  std::vector<int> signs_;
};

struct CopulaMarginal {
  ArchimedeanCopula copula;
  std::vector<NormalMargin> margins;

  CopulaMarginal(ArchimedeanCopula c, std::vector<NormalMargin> m)
      : copula(std::move(c)), margins(std::move(m)) {
    if (margins.size() != copula.dim()) throw DimensionMismatch(copula.dim(), margins.size());
  }

  Point to_unit(std::span<const double> y) const {
    Point u(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) u[i] = margins[i].cdf(y[i]);
    return u;
  }

  bool operator==(const CopulaMarginal&) const = default;
};

class MvGaussian {
 public:
  MvGaussian(std::vector<double> mean, std::vector<std::vector<double>> cov)
      : mean_(std::move(mean)), cov_(std::move(cov)) {
    const std::size_t d = mean_.size();
    if (d == 0) throw InvalidParameter("mvgauss: empty mean");
    if (cov_.size() != d) throw DimensionMismatch(d, cov_.size());
    for (const auto& row : cov_)
      if (row.size() != d) throw DimensionMismatch(d, row.size());
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(mean_[i])) throw InvalidParameter("mvgauss: non-finite mean");
      if (!(cov_[i][i] > 0.0) || !std::isfinite(cov_[i][i]))
        throw InvalidParameter("mvgauss: variances must be positive (degenerate coordinate)");
      for (std::size_t j = 0; j < i; ++j)
        if (cov_[i][j] != cov_[j][i]) throw InvalidParameter("mvgauss: covariance not symmetric");
    }
    // Cholesky with a PSD tolerance; a zero pivot is allowed (singular but PSD).
    chol_.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t j = 0; j < d; ++j) {
      double s = cov_[j][j];
      for (std::size_t k = 0; k < j; ++k) s -= chol_[j][k] * chol_[j][k];
      if (s < -1e-12 * cov_[j][j]) throw InvalidParameter("mvgauss: covariance is not positive semi-definite");
      chol_[j][j] = std::sqrt(std::max(s, 0.0));
      for (std::size_t i = j + 1; i < d; ++i) {
        double t = cov_[i][j];
        for (std::size_t k = 0; k < j; ++k) t -= chol_[i][k] * chol_[j][k];
        chol_[i][j] = chol_[j][j] > 0.0 ? t / chol_[j][j] : 0.0;
      }
    }
  }

  std::size_t dim() const noexcept { return mean_.size(); }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<std::vector<double>>& cov() const noexcept { return cov_; }
  double sd(std::size_t i) const { return std::sqrt(cov_[i][i]); }
  double correlation(std::size_t i, std::size_t j) const {
    return std::clamp(cov_[i][j] / (sd(i) * sd(j)), -1.0, 1.0);
  }

  double cdf(std::span<const double> y) const {
    if (y.size() != dim()) throw DimensionMismatch(dim(), y.size());
    if (dim() == 1) return special::normal_cdf((y[0] - mean_[0]) / sd(0));
    if (dim() == 2)
      return special::bivariate_normal_cdf((y[0] - mean_[0]) / sd(0), (y[1] - mean_[1]) / sd(1),
                                           correlation(0, 1));
    throw Unsupported("mvgauss cdf is implemented for d <= 2");
  }

  void sample_into(Rng& rng, std::span<double> out) const {
    const std::size_t d = dim();
    std::vector<double> z(d);
    for (double& v : z) v = normal(rng);
    for (std::size_t i = 0; i < d; ++i) {
      double s = mean_[i];
      for (std::size_t k = 0; k <= i; ++k) s += chol_[i][k] * z[k];
      out[i] = s;
    }
  }

  bool operator==(const MvGaussian& o) const { return mean_ == o.mean_ && cov_ == o.cov_; }

 private:
  std::vector<double> mean_;
  std::vector<std::vector<double>> cov_;
  std::vector<std::vector<double>> chol_;
};

class Ensemble {
 public:
  explicit Ensemble(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) throw InvalidInput("ensemble needs at least one point");
    const std::size_t d = points_.front().size();
    if (d == 0) throw InvalidInput("ensemble points must have dimension >= 1");
    for (const auto& p : points_) {
      if (p.size() != d) throw DimensionMismatch(d, p.size());
      for (double v : p)
        if (!std::isfinite(v)) throw InvalidInput("ensemble point has a non-finite coordinate");
    }
  }

  std::size_t dim() const noexcept { return points_.front().size(); }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Point>& points() const noexcept { return points_; }

  std::size_t count_preceding(std::span<const double> y) const {
    std::size_t c = 0;
    for (const auto& p : points_) c += precedes(p, y) ? 1 : 0;
    return c;
  }

  double cdf(std::span<const double> y) const {
    if (y.size() != dim()) throw DimensionMismatch(dim(), y.size());
    return static_cast<double>(count_preceding(y)) / static_cast<double>(size());
  }

  Ensemble reflected(const OrthantCone& cone) const {
    std::vector<Point> pts;
    pts.reserve(points_.size());
    for (const auto& p : points_) pts.push_back(cone.reflect(p));
    return Ensemble(std::move(pts));
  }

  bool operator==(const Ensemble&) const = default;

 private:
  std::vector<Point> points_;
};

// A strictly increasing coordinate map. `affine` is set when the map is
// x -> scale * x + shift, which parametric forecasts can absorb exactly.
struct MonotoneMap {
  struct Affine {
    double scale = 1.0;
    double shift = 0.0;
  };

  std::function<double(double)> fn;
  std::optional<Affine> affine;

  static MonotoneMap identity() { return linear(1.0, 0.0); }
  static MonotoneMap linear(double scale, double shift) {
    if (!(scale > 0.0)) throw InvalidParameter("monotone map needs a positive scale");
    return {[scale, shift](double x) { return scale * x + shift; }, Affine{scale, shift}};
  }
  static MonotoneMap general(std::function<double(double)> f) { return {std::move(f), std::nullopt}; }

  double operator()(double x) const { return fn(x); }
};

class Forecast {
 public:
  using Rep = std::variant<CopulaMarginal, MvGaussian, Ensemble>;

  Forecast(CopulaMarginal c) : rep_(std::move(c)) {}
  Forecast(MvGaussian g) : rep_(std::move(g)) {}
  Forecast(Ensemble e) : rep_(std::move(e)) {}

  const Rep& rep() const noexcept { return rep_; }
  bool is_ensemble() const noexcept { return std::holds_alternative<Ensemble>(rep_); }
  bool is_continuous() const noexcept { return !is_ensemble(); }
  const Ensemble* ensemble() const noexcept { return std::get_if<Ensemble>(&rep_); }
  const CopulaMarginal* copula_marginal() const noexcept { return std::get_if<CopulaMarginal>(&rep_); }
  const MvGaussian* mv_gaussian() const noexcept { return std::get_if<MvGaussian>(&rep_); }

  std::string_view type_name() const {
    if (is_ensemble()) return "ensemble";
    if (mv_gaussian()) return "mvgauss";
    return "copula_marginal";
  }

  std::size_t dim() const {
    return std::visit(
        [](const auto& f) -> std::size_t {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, CopulaMarginal>) {
            return f.margins.size();
          } else {
            return f.dim();
          }
        },
        rep_);
  }

  double cdf(std::span<const double> y) const {
    if (y.size() != dim()) throw DimensionMismatch(dim(), y.size());
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, CopulaMarginal>) {
            return f.copula.cdf(f.to_unit(y));
          } else {
            return f.cdf(y);
          }
        },
        rep_);
  }

  // mu(y + E) for the orthant cone E. Ensembles and Gaussians use the
  // reflection identity; copula forecasts use inclusion-exclusion on C.
  double orthant_cdf(const OrthantCone& cone, std::span<const double> y) const {
    if (cone.dim() != dim()) throw DimensionMismatch(dim(), cone.dim());
    if (y.size() != dim()) throw DimensionMismatch(dim(), y.size());
    if (cone.is_lower()) return cdf(y);
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, CopulaMarginal>) {
            return f.copula.orthant_cdf(f.to_unit(y), cone.signs());
          } else if constexpr (std::is_same_v<T, MvGaussian>) {
            return reflected_gaussian(f, cone).cdf(cone.reflect(y));
          } else {
            const Point ry = cone.reflect(y);
            std::size_t c = 0;
            for (const auto& p : f.points()) c += precedes(cone.reflect(p), ry) ? 1 : 0;
            return static_cast<double>(c) / static_cast<double>(f.size());
          }
        },
        rep_);
  }

  // Marginal CDF of coordinate i and its left limit.
  double marginal_cdf(std::size_t i, double x) const { return marginal(i, x, false); }
  double marginal_cdf_left(std::size_t i, double x) const { return marginal(i, x, true); }

  void sample_into(Rng& rng, std::span<double> out) const {
    if (out.size() != dim()) throw DimensionMismatch(dim(), out.size());
    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, CopulaMarginal>) {
            f.copula.sample_into(rng, out);
            for (std::size_t i = 0; i < out.size(); ++i) {
              // uniform01 can return 0 for the independence copula
              const double u = out[i] > 0.0 ? out[i] : 0x1.0p-54;
              out[i] = f.margins[i].quantile(std::min(u, 1.0 - 0x1.0p-54));
            }
          } else if constexpr (std::is_same_v<T, MvGaussian>) {
            f.sample_into(rng, out);
          } else {
            const auto& p = f.points()[rng.uniform_int(0, f.size() - 1)];
            std::copy(p.begin(), p.end(), out.begin());
          }
        },
        rep_);
  }

  std::vector<Point> sample(Rng& rng, std::size_t n) const {
    std::vector<Point> out(n, Point(dim()));
    for (auto& p : out) sample_into(rng, p);
    return out;
  }

  bool operator==(const Forecast&) const = default;

 private:
  static MvGaussian reflected_gaussian(const MvGaussian& g, const OrthantCone& cone) {
    auto mean = g.mean();
    auto cov = g.cov();
    for (std::size_t i = 0; i < mean.size(); ++i) {
      if (cone[i] > 0) mean[i] = -mean[i];
      for (std::size_t j = 0; j < mean.size(); ++j) cov[i][j] *= cone[i] * cone[j];
    }
    return MvGaussian(std::move(mean), std::move(cov));
  }

  double marginal(std::size_t i, double x, bool left) const {
    if (i >= dim()) throw DimensionMismatch(dim(), i + 1);
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, CopulaMarginal>) {
            return f.margins[i].cdf(x);
          } else if constexpr (std::is_same_v<T, MvGaussian>) {
            return special::normal_cdf((x - f.mean()[i]) / f.sd(i));
          } else {
            std::size_t c = 0;
            for (const auto& p : f.points()) c += (left ? p[i] < x : p[i] <= x) ? 1 : 0;
            return static_cast<double>(c) / static_cast<double>(f.size());
          }
        },
        rep_);
  }

  Rep rep_;
};

// Forecast of T(Y) for a coordinatewise strictly increasing T.
inline Forecast apply_monotone(const Forecast& f, std::span<const MonotoneMap> maps) {
  if (maps.size() != f.dim()) throw DimensionMismatch(f.dim(), maps.size());
  if (const auto* e = f.ensemble()) {
    std::vector<Point> pts = e->points();
    for (auto& p : pts)
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = maps[i](p[i]);
    return Ensemble(std::move(pts));
  }
  for (const auto& m : maps)
    if (!m.affine) throw Unsupported("parametric forecasts only support affine increasing maps");
  if (const auto* cm = f.copula_marginal()) {
    auto margins = cm->margins;
    for (std::size_t i = 0; i < margins.size(); ++i)
      margins[i] = NormalMargin(maps[i].affine->scale * margins[i].mu + maps[i].affine->shift,
                                maps[i].affine->scale * margins[i].sigma);
    return CopulaMarginal(cm->copula, std::move(margins));
  }
  const auto& g = *f.mv_gaussian();
  auto mean = g.mean();
  auto cov = g.cov();
  for (std::size_t i = 0; i < mean.size(); ++i) {
    mean[i] = maps[i].affine->scale * mean[i] + maps[i].affine->shift;
    for (std::size_t j = 0; j < mean.size(); ++j) cov[i][j] *= maps[i].affine->scale * maps[j].affine->scale;
  }
  return MvGaussian(std::move(mean), std::move(cov));
}

// Forecast of (Y_{perm[0]}, ..., Y_{perm[d-1]}).
inline Forecast apply_permutation(const Forecast& f, std::span<const std::size_t> perm) {
  const std::size_t d = f.dim();
  if (perm.size() != d) throw DimensionMismatch(d, perm.size());
  std::vector<bool> seen(d, false);
  for (std::size_t p : perm) {
    if (p >= d || seen[p]) throw InvalidParameter("not a permutation");
    seen[p] = true;
  }
  if (const auto* e = f.ensemble()) {
    std::vector<Point> pts;
    for (const auto& p : e->points()) {
      Point q(d);
      for (std::size_t i = 0; i < d; ++i) q[i] = p[perm[i]];
      pts.push_back(std::move(q));
    }
    return Ensemble(std::move(pts));
  }
  if (const auto* cm = f.copula_marginal()) {
    // Archimedean copulas are exchangeable, so only the margins move.
    std::vector<NormalMargin> margins(d);
    for (std::size_t i = 0; i < d; ++i) margins[i] = cm->margins[perm[i]];
    return CopulaMarginal(cm->copula, std::move(margins));
  }
  const auto& g = *f.mv_gaussian();
  std::vector<double> mean(d);
  std::vector<std::vector<double>> cov(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i) {
    mean[i] = g.mean()[perm[i]];
    for (std::size_t j = 0; j < d; ++j) cov[i][j] = g.cov()[perm[i]][perm[j]];
  }
  return MvGaussian(std::move(mean), std::move(cov));
}

}  // namespace coppit
