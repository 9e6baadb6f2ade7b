#pragma once

// PIT, CopPIT, multivariate ranks, histograms and climatological calibration
// curves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coppit/error.hpp"
#include "coppit/forecast.hpp"
#include "coppit/kendall.hpp"
#include "coppit/rng.hpp"
#include "coppit/stats.hpp"

namespace coppit {

inline constexpr int kDefaultBins = 20;
inline constexpr int kDefaultGrid = 101;

struct CopPitRecord {
  double h_at_y = 0.0;
  double k_left = 0.0;
  double k_right = 0.0;
  double v = 0.0;
  double u = 0.0;
  std::optional<int> rank;

  bool operator==(const CopPitRecord&) const = default;
};

// Randomized value on [lo, hi]: lo + v (hi - lo).
inline double randomize(double lo, double hi, double v) noexcept { return lo + v * (hi - lo); }

// Randomized PIT of a univariate forecast: F(y-) + v (F(y) - F(y-)).
inline double pit(const Forecast& f, double y, double v) {
  if (f.dim() != 1) throw DimensionMismatch(1, f.dim());
  return randomize(f.marginal_cdf_left(0, y), f.marginal_cdf(0, y), v);
}

// PIT of coordinate i of a multivariate forecast.
inline double marginal_pit(const Forecast& f, std::size_t i, double y, double v) {
  return randomize(f.marginal_cdf_left(i, y), f.marginal_cdf(i, y), v);
}

inline CopPitRecord coppit_from_h(double h, const KendallFn& kfn, double v) {
  CopPitRecord r;
  r.h_at_y = h;
  r.k_right = kfn.eval(h);
  r.k_left = kfn.is_continuous() ? r.k_right : kfn.eval_left(h);
  r.v = v;
  r.u = kfn.is_continuous() ? r.k_right : randomize(r.k_left, r.k_right, v);
  return r;
}

inline CopPitRecord coppit(const Forecast& f, const KendallFn& kfn, std::span<const double> y, double v) {
  if (y.size() != f.dim()) throw DimensionMismatch(f.dim(), y.size());
  return coppit_from_h(f.cdf(y), kfn, v);
}

// CopPIT with the orthant CDF H^E in place of H; kfn must be built for the same cone.
inline CopPitRecord coppit_directional(const Forecast& f, const OrthantCone& cone, const KendallFn& kfn,
                                       std::span<const double> y, double v) {
  if (y.size() != f.dim()) throw DimensionMismatch(f.dim(), y.size());
  return coppit_from_h(f.orthant_cdf(cone, y), kfn, v);
}

struct PreRanks {
  std::size_t rho0 = 0;
  std::vector<std::size_t> rho;       // rho_k, k = 1..m
  std::vector<bool> y_precedes;       // 1(y <= x_k)
};

inline PreRanks pre_ranks(std::span<const Point> points, std::span<const double> y) {
  const std::size_t m = points.size();
  if (m == 0) throw InvalidInput("pre-ranks of an empty ensemble");
  PreRanks pr;
  pr.rho0 = 1;
  pr.rho.assign(m, 0);
  pr.y_precedes.assign(m, false);
  for (const auto& x : points) {
    if (x.size() != y.size()) throw DimensionMismatch(y.size(), x.size());
    pr.rho0 += precedes(x, y) ? 1 : 0;
  }
  for (std::size_t k = 0; k < m; ++k) {
    pr.y_precedes[k] = precedes(y, points[k]);
    std::size_t c = pr.y_precedes[k] ? 1 : 0;
    for (std::size_t i = 0; i < m; ++i) c += precedes(points[i], points[k]) ? 1 : 0;
    pr.rho[k] = c;
  }
  return pr;
}

// Integer range [lo, hi] over which the multivariate rank is uniform.
inline std::pair<int, int> rank_range(const PreRanks& pr) {
  int lo = 1, hi = 1;
  for (std::size_t r : pr.rho) {
    lo += r < pr.rho0 ? 1 : 0;
    hi += r <= pr.rho0 ? 1 : 0;
  }
  return {lo, hi};
}

// Rank of the observation pre-rank among all pre-ranks, ties broken uniformly.
// Consumes exactly one word from rng.
inline int multivariate_rank(std::span<const Point> points, std::span<const double> y, Rng& rng) {
  const auto [lo, hi] = rank_range(pre_ranks(points, y));
  const std::uint64_t word = rng.next();
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  // Multiply-shift to [0, span); span <= m + 1 keeps the bias below 2^-40.
  const auto offset = static_cast<int>((static_cast<unsigned __int128>(word) * span) >> 64);
  return lo + offset;
}

// Interval on which the ensemble CopPIT is uniform, from pre-ranks alone.
inline std::pair<double, double> coppit_interval(std::span<const Point> points, std::span<const double> y) {
  const PreRanks pr = pre_ranks(points, y);
  const std::size_t m = points.size();
  std::size_t lo = 0, hi = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t lhs = pr.rho[k] - (pr.y_precedes[k] ? 1 : 0);
    lo += lhs < pr.rho0 - 1 ? 1 : 0;
    hi += lhs <= pr.rho0 - 1 ? 1 : 0;
  }
  return {static_cast<double>(lo) / static_cast<double>(m), static_cast<double>(hi) / static_cast<double>(m)};
}

struct HistogramResult {
  int bin_count = 0;
  std::vector<long long> counts;
  long long total = 0;
  double chi_square_stat = 0.0;
  int chi_square_df = 0;
  double ks_stat = 0.0;

  double bin_lo(int i) const { return static_cast<double>(i) / bin_count; }
  double bin_hi(int i) const { return static_cast<double>(i + 1) / bin_count; }
  double chi_square_pvalue() const { return stats::chi_square_sf(chi_square_stat, chi_square_df); }
  double ks_pvalue() const { return stats::ks_uniform_pvalue(static_cast<int>(total), ks_stat); }
  double chi_square_critical(double level) const { return stats::chi_square_quantile(level, chi_square_df); }

  bool operator==(const HistogramResult&) const = default;
};

// Bin index on equal-width bins over [0,1]: right-closed, first bin closed at 0.
inline int bin_index(double x, int bins) {
  if (x <= 0.0) return 0;
  const int b = static_cast<int>(std::ceil(x * bins)) - 1;
  return std::clamp(b, 0, bins - 1);
}

inline HistogramResult histogram(std::span<const double> values, int bins = kDefaultBins) {
  if (bins < 2) throw InvalidParameter("histogram needs at least 2 bins");
  if (values.empty()) throw InvalidInput("histogram of an empty sample");
  HistogramResult h;
  h.bin_count = bins;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double x : values) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("histogram values must lie in [0,1]");
    ++h.counts[static_cast<std::size_t>(bin_index(x, bins))];
  }
  h.total = static_cast<long long>(values.size());
  const double expected = static_cast<double>(h.total) / bins;
  for (long long c : h.counts) {
    const double diff = static_cast<double>(c) - expected;
    h.chi_square_stat += diff * diff / expected;
  }
  h.chi_square_df = bins - 1;
  h.ks_stat = stats::ks_uniform_statistic(values);
  return h;
}

// Rank histogram: ranks 1..m+1 mapped to bin centres (r - 1/2)/(m + 1).
inline HistogramResult rank_histogram(std::span<const int> ranks, int m) {
  if (m < 1) throw InvalidParameter("rank histogram needs m >= 1");
  std::vector<double> centres;
  centres.reserve(ranks.size());
  for (int r : ranks) {
    if (r < 1 || r > m + 1) throw DomainError("rank outside [1, m+1]");
    centres.push_back((r - 0.5) / (m + 1));
  }
  return histogram(centres, m + 1);
}

struct ClicalCurve {
  std::vector<double> grid;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double max_abs_gap = 0.0;

  bool operator==(const ClicalCurve&) const = default;
};

struct ClicalCase {
  double h_at_y;
  const KendallFn* kfn;
};

inline std::vector<double> uniform_grid(int size) {
  if (size < 2) throw InvalidParameter("grid needs at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (size - 1);
  return g;
}

// (1/J) sum 1{H_j(y_j) <= w} against (1/J) sum K_j(w) on a uniform grid.
inline ClicalCurve clical_curve(std::span<const ClicalCase> cases, int grid_size = kDefaultGrid) {
  if (cases.empty()) throw InvalidInput("calibration curve needs at least one case");
  ClicalCurve c;
  c.grid = uniform_grid(grid_size);
  c.lhs.assign(c.grid.size(), 0.0);
  c.rhs.assign(c.grid.size(), 0.0);
  std::vector<double> hs;
  hs.reserve(cases.size());
  for (const auto& cs : cases) hs.push_back(cs.h_at_y);
  std::sort(hs.begin(), hs.end());
  const double J = static_cast<double>(cases.size());
  for (std::size_t g = 0; g < c.grid.size(); ++g) {
    const double w = c.grid[g];
    c.lhs[g] = static_cast<double>(std::upper_bound(hs.begin(), hs.end(), w) - hs.begin()) / J;
    double s = 0.0;
    for (const auto& cs : cases) s += cs.kfn->eval(w);
    c.rhs[g] = s / J;
    c.max_abs_gap = std::max(c.max_abs_gap, std::fabs(c.lhs[g] - c.rhs[g]));
  }
  return c;
}

// Streaming form of clical_curve: cases are added one at a time, either with a
// Kendall function or with its values already evaluated on the grid.
class ClicalAccumulator {
 public:
  explicit ClicalAccumulator(int grid_size = kDefaultGrid)
      : grid_(uniform_grid(grid_size)), rhs_sum_(grid_.size(), 0.0) {}

  const std::vector<double>& grid() const noexcept { return grid_; }

  std::vector<double> evaluate(const KendallFn& kfn) const {
    std::vector<double> k(grid_.size());
    for (std::size_t g = 0; g < grid_.size(); ++g) k[g] = kfn.eval(grid_[g]);
    return k;
  }

  void add(double h_at_y, std::span<const double> k_on_grid) {
    if (k_on_grid.size() != grid_.size()) throw DimensionMismatch(grid_.size(), k_on_grid.size());
    hs_.push_back(h_at_y);
    for (std::size_t g = 0; g < grid_.size(); ++g) rhs_sum_[g] += k_on_grid[g];
  }

  void add(double h_at_y, const KendallFn& kfn) { add(h_at_y, evaluate(kfn)); }

  std::size_t size() const noexcept { return hs_.size(); }

  ClicalCurve finish() const {
    if (hs_.empty()) throw InvalidInput("calibration curve needs at least one case");
    ClicalCurve c;
    c.grid = grid_;
    std::vector<double> hs = hs_;
    std::sort(hs.begin(), hs.end());
    const double J = static_cast<double>(hs.size());
    for (std::size_t g = 0; g < grid_.size(); ++g) {
      c.lhs.push_back(static_cast<double>(std::upper_bound(hs.begin(), hs.end(), grid_[g]) - hs.begin()) / J);
      c.rhs.push_back(rhs_sum_[g] / J);
      c.max_abs_gap = std::max(c.max_abs_gap, std::fabs(c.lhs[g] - c.rhs[g]));
    }
    return c;
  }

 private:
  std::vector<double> grid_;
  std::vector<double> rhs_sum_;
  std::vector<double> hs_;
};

// Batch form over forecasts and outcomes, optionally directional.
inline ClicalCurve clical_curve(std::span<const Forecast> forecasts, std::span<const KendallFn> kfns,
                                std::span<const Point> outcomes, const std::optional<OrthantCone>& cone,
                                int grid_size = kDefaultGrid) {
  if (forecasts.size() != kfns.size() || forecasts.size() != outcomes.size())
    throw InvalidInput("calibration curve: batch sizes differ");
  std::vector<ClicalCase> cases;
  cases.reserve(forecasts.size());
  for (std::size_t j = 0; j < forecasts.size(); ++j) {
    const double h = cone ? forecasts[j].orthant_cdf(*cone, outcomes[j]) : forecasts[j].cdf(outcomes[j]);
    cases.push_back({h, &kfns[j]});
  }
  return clical_curve(cases, grid_size);
}

}  // namespace coppit
