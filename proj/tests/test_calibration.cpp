#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "coppit/calibration.hpp"
#include "coppit/stats.hpp"
#include "oracles.hpp"

using namespace coppit;

namespace {

std::vector<Point> random_points(Rng& rng, std::size_t m, std::size_t d, int levels) {
  std::vector<Point> pts(m, Point(d));
  for (auto& p : pts)
    for (auto& x : p) x = std::floor(levels * rng.uniform01());
  return pts;
}

}  // namespace

TEST(Pit, Examples) {
  const Forecast n01(MvGaussian({0}, {{1}}));
  for (double v : {0.0, 0.3, 0.99}) EXPECT_DOUBLE_EQ(pit(n01, 0.0, v), 0.5);
  const Forecast atom{Ensemble(std::vector<Point>{{0}})};
  EXPECT_DOUBLE_EQ(pit(atom, 0.0, 0.3), 0.3);
  const Forecast n21(MvGaussian({2}, {{1}}));
  EXPECT_NEAR(pit(n21, 2 + 1.6449, 0.5), 0.95, 1e-5);
  EXPECT_THROW(pit(Forecast(Ensemble(std::vector<Point>{{0, 0}})), 0.0, 0.5), DimensionMismatch);
}

TEST(CopPit, EnsembleHandExample) {
  const std::vector<Point> pts{{0, 0}, {2, 2}};
  const Forecast f{Ensemble(pts)};
  const auto r = coppit::coppit(f, build_empirical_pseudo(pts), Point{1, 1}, 0.4);
  EXPECT_EQ(r.h_at_y, 0.5);
  EXPECT_EQ(r.k_left, 0.0);
  EXPECT_EQ(r.k_right, 0.5);
  EXPECT_DOUBLE_EQ(r.u, 0.2);
}

TEST(CopPit, GumbelClosedFormChain) {
  const Forecast f = CopulaMarginal(ArchimedeanCopula(Family::Gumbel, 2, 2), {NormalMargin(), NormalMargin()});
  const auto r = coppit::coppit(f, build_analytic(f), Point{0, 0}, 0.77);
  const double h = std::exp(-std::sqrt(2.0) * std::log(2.0));
  EXPECT_NEAR(r.h_at_y, h, 1e-15);
  EXPECT_NEAR(r.u, h - h * std::log(h) / 2, 1e-15);
  EXPECT_NEAR(r.u, 0.5590, 5e-4);
  EXPECT_EQ(r.k_left, r.k_right);  // continuous: v is ignored
}

TEST(CopPit, UnivariateReducesToPit) {
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const double mu = -2 + 4 * rng.uniform01(), sd = 0.5 + 2 * rng.uniform01();
    const Forecast f(MvGaussian({mu}, {{sd * sd}}));
    const double y = mu + sd * (-3 + 6 * rng.uniform01());
    const double v = rng.uniform01();
    Rng krng(k);
    const auto kfn = build_kendall(f, KendallStrategy::Auto, krng, 10);
    EXPECT_NEAR(coppit::coppit(f, kfn, Point{y}, v).u, pit(f, y, v), 1e-12);
  }
}

TEST(CopPit, RecordInvariants) {
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const auto pts = random_points(rng, 1 + rng.uniform_int(0, 9), 2, 3);
    const Point y{std::floor(3 * rng.uniform01()), std::floor(3 * rng.uniform01())};
    const double v = rng.uniform01();
    const auto r = coppit::coppit(Forecast(Ensemble(pts)), build_empirical_pseudo(pts), y, v);
    ASSERT_LE(r.k_left, r.k_right);
    ASSERT_EQ(r.u, r.k_left + v * (r.k_right - r.k_left));
  }
}

TEST(Rank, HandExamples) {
  const std::vector<Point> pts{{0, 0}, {2, 2}};
  const auto pr = pre_ranks(pts, Point{1, 1});
  EXPECT_EQ(pr.rho0, 2u);
  EXPECT_EQ(pr.rho, (std::vector<std::size_t>{1, 3}));
  Rng rng(3);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(multivariate_rank(pts, Point{1, 1}, rng), 2);
  EXPECT_EQ(multivariate_rank(pts, Point{-1, -1}, rng), 1);
  EXPECT_EQ(multivariate_rank(pts, Point{5, 5}, rng), 3);
}

TEST(Rank, AlwaysInRange) {
  Rng rng(4);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t m = 1 + rng.uniform_int(0, 19);
    const auto pts = random_points(rng, m, 1 + rng.uniform_int(0, 2), 3);
    const Point y = random_points(rng, 1, pts[0].size(), 3)[0];
    const int r = multivariate_rank(pts, y, rng);
    ASSERT_GE(r, 1);
    ASSERT_LE(r, static_cast<int>(m) + 1);
  }
}

TEST(Rank, TiesAreUniform) {
  const std::vector<Point> pts{{0, 0}, {0, 0}, {0, 0}};
  const auto [lo, hi] = rank_range(pre_ranks(pts, Point{0, 0}));
  EXPECT_EQ(lo, 1);
  EXPECT_EQ(hi, 4);
  Rng rng(5);
  std::vector<long long> counts(4, 0);
  for (int i = 0; i < 10000; ++i) ++counts[static_cast<std::size_t>(multivariate_rank(pts, Point{0, 0}, rng) - 1)];
  EXPECT_GT(oracle::chi_square_gof_pvalue(counts, {0.25, 0.25, 0.25, 0.25}), 0.01);
}

TEST(Interval, Examples) {
  const std::vector<Point> pts{{0, 0}, {2, 2}};
  EXPECT_EQ(coppit_interval(pts, Point{1, 1}), std::make_pair(0.0, 0.5));
  EXPECT_EQ(coppit_interval(pts, Point{3, 3}).second, 1.0);
  const std::vector<Point> one{{1, 1}};
  EXPECT_EQ(coppit_interval(one, Point{0, 0}), std::make_pair(0.0, 0.0));
}

TEST(Interval, EqualsPseudoKendallBitExact) {
  Rng rng(6);
  for (int k = 0; k < 300; ++k) {
    const std::size_t m = 1 + rng.uniform_int(0, 19), d = 1 + rng.uniform_int(0, 2);
    const auto pts = random_points(rng, m, d, 4);
    const Point y = random_points(rng, 1, d, 4)[0];
    const auto kfn = build_empirical_pseudo(pts);
    const double h = Ensemble(pts).cdf(y);
    ASSERT_EQ(coppit_interval(pts, y), std::make_pair(kfn.eval_left(h), kfn.eval(h)));
  }
}

TEST(Histogram, Examples) {
  const std::vector<double> same(4000, 0.5);
  const auto h = histogram(same, 20);
  EXPECT_EQ(h.counts[9], 4000);
  EXPECT_DOUBLE_EQ(h.chi_square_stat, 76000.0);
  EXPECT_EQ(h.chi_square_df, 19);

  std::vector<double> spread;
  for (int k = 0; k < 20; ++k) spread.push_back(0.025 + 0.05 * k);
  const auto g = histogram(spread, 20);
  for (auto c : g.counts) EXPECT_EQ(c, 1);
  EXPECT_EQ(g.chi_square_stat, 0.0);

  EXPECT_DOUBLE_EQ(histogram(std::vector<double>{0.5}, 2).ks_stat, 0.5);
  EXPECT_THROW(histogram(std::vector<double>{}, 20), InvalidInput);
  EXPECT_THROW(histogram(same, 1), InvalidParameter);
  EXPECT_THROW(histogram(std::vector<double>{1.2}, 4), DomainError);
}

TEST(Histogram, BinEdges) {
  EXPECT_EQ(bin_index(0.0, 20), 0);
  EXPECT_EQ(bin_index(0.05, 20), 0);  // right-closed
  EXPECT_EQ(bin_index(std::nextafter(0.05, 1.0), 20), 1);
  EXPECT_EQ(bin_index(1.0, 20), 19);
  Rng rng(7);
  std::vector<double> x(1000);
  for (auto& v : x) v = rng.uniform01();
  const auto h = histogram(x, 7);
  long long s = 0;
  for (auto c : h.counts) s += c;
  EXPECT_EQ(s, h.total);
}

TEST(Histogram, RankBins) {
  const std::vector<int> ranks{1, 2, 3, 3, 9};
  const auto h = rank_histogram(ranks, 8);
  EXPECT_EQ(h.bin_count, 9);
  EXPECT_EQ(h.counts, (std::vector<long long>{1, 1, 2, 0, 0, 0, 0, 0, 1}));
  EXPECT_THROW(rank_histogram(std::vector<int>{10}, 8), DomainError);
}

TEST(Clical, EnsembleOutcomesFromOwnForecast) {
  Rng rng(8);
  ClicalAccumulator acc(101);
  for (int j = 0; j < 4000; ++j) {
    std::vector<Point> pts(10, Point(2));
    for (auto& p : pts)
      for (auto& x : p) x = rng.uniform01();
    const Point y = pts[rng.uniform_int(0, 9)];
    acc.add(Ensemble(pts).cdf(y), build_empirical_pseudo(pts));
  }
  const auto c = acc.finish();
  EXPECT_LE(c.max_abs_gap, 0.05);
  EXPECT_EQ(c.lhs.back(), 1.0);
  EXPECT_EQ(c.rhs.back(), 1.0);
  for (std::size_t g = 1; g < c.grid.size(); ++g) {
    EXPECT_GE(c.lhs[g], c.lhs[g - 1]);
    EXPECT_GE(c.rhs[g], c.rhs[g - 1]);
  }
}

TEST(Clical, BatchFormMatchesAccumulator) {
  Rng rng(9);
  std::vector<Forecast> fs;
  std::vector<KendallFn> ks;
  std::vector<Point> ys;
  ClicalAccumulator acc(51);
  for (int j = 0; j < 50; ++j) {
    std::vector<Point> pts(5, Point(2));
    for (auto& p : pts)
      for (auto& x : p) x = rng.uniform01();
    fs.emplace_back(Ensemble(pts));
    ks.push_back(build_empirical_pseudo(pts));
    ys.push_back({rng.uniform01(), rng.uniform01()});
    acc.add(fs.back().cdf(ys.back()), ks.back());
  }
  EXPECT_EQ(clical_curve(fs, ks, ys, std::nullopt, 51), acc.finish());
  EXPECT_THROW(ClicalAccumulator(5).finish(), InvalidInput);
}

TEST(Directional, LowerConeReproducesCopPit) {
  Rng rng(10);
  for (int k = 0; k < 100; ++k) {
    const auto pts = random_points(rng, 6, 2, 5);
    const Point y = random_points(rng, 1, 2, 5)[0];
    const Forecast f{Ensemble(pts)};
    const auto kfn = build_empirical_pseudo(pts);
    const double v = rng.uniform01();
    EXPECT_EQ(coppit_directional(f, OrthantCone::lower(2), kfn, y, v), coppit::coppit(f, kfn, y, v));
  }
}

TEST(Directional, EnsembleReflectionBitExact) {
  Rng rng(11);
  const auto ne = OrthantCone::parse("ne");
  for (int k = 0; k < 100; ++k) {
    const auto pts = random_points(rng, 7, 2, 5);
    const Point y = random_points(rng, 1, 2, 5)[0];
    const double v = rng.uniform01();
    const Forecast f{Ensemble(pts)};
    Rng unused(0);
    const auto kne = build_kendall(f, KendallStrategy::Pseudo, unused, 0, ne);
    std::vector<Point> neg = pts;
    for (auto& p : neg)
      for (auto& x : p) x = -x;
    const Point ny{-y[0], -y[1]};
    EXPECT_EQ(coppit_directional(f, ne, kne, y, v), coppit::coppit(Forecast(Ensemble(neg)), build_empirical_pseudo(neg), ny, v));
  }
}

TEST(Directional, RadiallySymmetricNeMatchesSw) {
  const Forecast f(MvGaussian({0, 0}, {{1, 0.5}, {0.5, 1}}));
  const auto sw = OrthantCone::lower(2), ne = OrthantCone::parse("ne");
  Rng ka(12), kb(13);
  const auto ksw = build_monte_carlo(f, ka, 10000, sw);
  const auto kne = build_monte_carlo(f, kb, 10000, ne);
  Rng rng(14);
  std::vector<double> usw, une;
  for (const auto& y : f.sample(rng, 4000)) {
    const double v = rng.uniform01();
    usw.push_back(coppit_directional(f, sw, ksw, y, v).u);
    une.push_back(coppit_directional(f, ne, kne, y, v).u);
  }
  EXPECT_GT(stats::ks_two_sample(usw, une).pvalue, 0.01);
}

// With m large the rank, spread over its unit cell, and the CopPIT value
// have nearly the same law. Cases with no member below y give CopPIT 0 but a
// spread-out rank; that mass alone is about 0.02 here.
TEST(LargeM, RankAndCopPitAgree) {
  const int m = 200, J = 4000;
  const Forecast law(MvGaussian({0, 0}, {{1, 0.5}, {0.5, 1}}));
  Rng rng(15);
  std::vector<double> rank_u, cop_u;
  for (int j = 0; j < J; ++j) {
    const auto pts = law.sample(rng, m);
    const auto y = law.sample(rng, 1)[0];
    const double v = rng.uniform01();
    rank_u.push_back((multivariate_rank(pts, y, rng) - 1 + v) / (m + 1));
    cop_u.push_back(coppit::coppit(Forecast(Ensemble(pts)), build_empirical_pseudo(pts), y, v).u);
  }
  EXPECT_LE(stats::ks_two_sample(rank_u, cop_u).statistic, 0.02);
}
