#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "coppit/simstudy.hpp"
#include "coppit/stats.hpp"

using namespace coppit;
using namespace coppit::sim;

namespace {

double ks_p(const std::vector<double>& u) {
  return stats::ks_uniform_pvalue(static_cast<int>(u.size()), stats::ks_uniform_statistic(u));
}

}  // namespace

TEST(Bivariate, TruthMoments) {
  BivariateScenario sc;
  sc.J = 20000;
  sc.forecasters = {"TTT"};
  sc.directional = false;
  const auto res = run_bivariate(sc);
  double s1 = 0, s2 = 0, q2 = 0;
  for (const auto& c : res.at("TTT").cases) {
    s1 += c.y[0];
    s2 += c.y[1];
    q2 += c.y[1] * c.y[1];
  }
  const double n = static_cast<double>(sc.J);
  EXPECT_NEAR(s1 / n, 2 - 2.0 / 7, 0.05);
  const double var2 = q2 / n - (s2 / n) * (s2 / n);
  EXPECT_NEAR(var2, 1.5, 0.075);
}

TEST(Bivariate, AnnouncedParameters) {
  BivariateScenario sc;
  sc.J = 50;
  sc.directional = false;
  const auto res = run_bivariate(sc);
  for (std::size_t j = 0; j < sc.J; ++j) {
    const auto& t = res.at("TTT").cases[j];
    EXPECT_EQ(t.announced, truth_params(t.b1, t.b2));
    const auto& f = res.at("FFF").cases[j];
    EXPECT_EQ(f.b1, t.b1);
    EXPECT_EQ(f.y, t.y);  // all forecasters see the same outcome
    EXPECT_DOUBLE_EQ(f.announced.mu1, 0.8 * (2 - t.b1));
    EXPECT_DOUBLE_EQ(f.announced.var2, 0.8 / t.b2);
    EXPECT_DOUBLE_EQ(f.announced.tau, 0.6 * 0.5 * (t.b1 + t.b2));
  }
}

TEST(Bivariate, DeterministicAndThreadIndependent) {
  BivariateScenario sc;
  sc.J = 300;
  sc.forecasters = {"TTT", "TFF"};
  sc.kendall_n = 500;
  const auto a = run_bivariate(sc);
  sc.threads = 3;
  const auto b = run_bivariate(sc);
  for (const auto& l : sc.forecasters) {
    const auto& ba = a.at(l);
    const auto& bb = b.at(l);
    EXPECT_EQ(ba.coppit_values(), bb.coppit_values());
    for (std::size_t q = 0; q < 4; ++q) {
      EXPECT_EQ(ba.directional_values(q), bb.directional_values(q));
      EXPECT_EQ(ba.clical_directional[q], bb.clical_directional[q]);
    }
    EXPECT_EQ(ba.clical, bb.clical);
  }
}

TEST(Bivariate, SubsetDoesNotChangeDraws) {
  BivariateScenario sc;
  sc.J = 100;
  sc.directional = false;
  const auto all = run_bivariate(sc);
  sc.forecasters = {"FTF"};
  const auto one = run_bivariate(sc);
  EXPECT_EQ(all.at("FTF").coppit_values(), one.at("FTF").coppit_values());
}

TEST(Bivariate, SouthWestIsStandard) {
  BivariateScenario sc;
  sc.J = 64;
  sc.forecasters = {"TFT"};
  sc.kendall_n = 200;
  const auto res = run_bivariate(sc);
  EXPECT_EQ(res.at("TFT").directional_values(0), res.at("TFT").coppit_values());
}

TEST(Bivariate, CalibratedForecasterLooksUniform) {
  BivariateScenario sc;
  sc.J = 4000;
  sc.forecasters = {"TTT", "FFF"};
  sc.directional = false;
  const auto res = run_bivariate(sc);
  EXPECT_GT(ks_p(res.at("TTT").coppit_values()), 0.01);
  EXPECT_LT(ks_p(res.at("FFF").coppit_values()), 0.01);
}

TEST(Bivariate, Labels) {
  const auto f = Forecaster::parse("TFT");
  EXPECT_TRUE(f.mean_ok);
  EXPECT_FALSE(f.variance_ok);
  EXPECT_TRUE(f.copula_ok);
  EXPECT_THROW(Forecaster::parse("TF"), InvalidParameter);
  EXPECT_THROW(Forecaster::parse("TXT"), InvalidParameter);
  BivariateScenario sc;
  sc.J = 0;
  EXPECT_THROW(run_bivariate(sc), InvalidParameter);
}

TEST(HighDim, SmallRun) {
  HighDimScenario sc;
  sc.d = 10;
  sc.J = 60;
  sc.kendall_n = 500;
  const auto a = run_highdim(sc);
  for (auto v : sc.variants) {
    const auto& b = a.at(v);
    ASSERT_EQ(b.cases.size(), sc.J);
    for (const auto& c : b.cases) {
      EXPECT_GE(c.coppit.u, 0.0);
      EXPECT_LE(c.coppit.u, 1.0);
      ASSERT_TRUE(c.coppit.rank.has_value());
      EXPECT_GE(*c.coppit.rank, 1);
      EXPECT_LE(*c.coppit.rank, static_cast<int>(sc.m) + 1);
    }
  }
  for (std::size_t j = 0; j < sc.J; ++j) {
    const auto& t = a.at(HighDimVariant::TrueFrank).cases[j];
    EXPECT_NEAR(a.at(HighDimVariant::ShrunkFrank).cases[j].tau_forecast, 0.8 * t.tau_true, 1e-8);
  }
  sc.threads = 2;
  const auto b = run_highdim(sc);
  for (auto v : sc.variants) EXPECT_EQ(a.at(v).coppit_values(), b.at(v).coppit_values());
  EXPECT_EQ(highdim_variant_from_string("joe-swap"), HighDimVariant::JoeSwap);
  EXPECT_THROW(highdim_variant_from_string("frank"), InvalidParameter);
}

TEST(Demo, SmallRun) {
  DemoScenario sc;
  sc.J = 200;
  sc.kendall_n = 500;
  const auto a = run_demo_emos(sc);
  for (auto v : sc.variants) {
    for (int r : a.at(v).ranks()) {
      EXPECT_GE(r, 1);
      EXPECT_LE(r, static_cast<int>(sc.m) + 1);
    }
    for (const auto& c : a.at(v).cases) {
      EXPECT_GE(c.rho, 0.2);
      EXPECT_LE(c.rho, 0.9);
    }
  }
  const auto b = run_demo_emos(sc);
  for (auto v : sc.variants) EXPECT_EQ(a.at(v).coppit_values(), b.at(v).coppit_values());
  EXPECT_THROW(demo_variant_from_string("emos2"), InvalidParameter);
}
