#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "coppit/copula.hpp"
#include "coppit/rng.hpp"
#include "oracles.hpp"

using coppit::ArchimedeanCopula;
using coppit::Family;
using coppit::Rng;

namespace {

const Family kFamilies[] = {Family::Independence, Family::Gumbel, Family::Frank, Family::Joe, Family::Clayton};
const Family kParametric[] = {Family::Gumbel, Family::Frank, Family::Joe, Family::Clayton};

double mc_tau(const ArchimedeanCopula& c, std::uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<std::pair<double, double>> xy(static_cast<std::size_t>(n));
  std::vector<double> u(2);
  for (auto& p : xy) {
    c.sample_into(rng, u);
    p = {u[0], u[1]};
  }
  return oracle::kendall_tau(std::move(xy));
}

}  // namespace

TEST(Generator, Examples) {
  EXPECT_NEAR(ArchimedeanCopula(Family::Gumbel, 2, 2).generator(std::exp(-1.0)), 1.0, 1e-15);
  EXPECT_NEAR(ArchimedeanCopula(Family::Clayton, 1, 2).generator(0.5), 1.0, 1e-15);
  for (auto f : kFamilies) EXPECT_EQ(ArchimedeanCopula(f, 2.5, 2).generator(1.0), 0.0) << to_string(f);
}

TEST(Generator, DecreasingWithMatchingDerivative) {
  for (auto f : kFamilies) {
    const ArchimedeanCopula c(f, 3.0, 2);
    for (double t = 0.05; t < 0.96; t += 0.05) {
      EXPECT_GT(c.generator(t), c.generator(t + 0.01));
      const double h = 1e-6;
      const double fd = (c.generator(t + h) - c.generator(t - h)) / (2 * h);
      EXPECT_NEAR(c.generator_deriv(t), fd, 1e-5 * std::max(1.0, std::abs(fd))) << to_string(f) << ' ' << t;
      EXPECT_NEAR(c.inverse_generator(c.generator(t)), t, 1e-12);
    }
  }
}

TEST(Generator, DomainErrors) {
  const ArchimedeanCopula c(Family::Gumbel, 2, 2);
  EXPECT_THROW(c.generator(0.0), coppit::DomainError);
  EXPECT_THROW(c.generator(1.2), coppit::DomainError);
}

TEST(Cdf, Examples) {
  const std::vector<double> half{0.5, 0.5};
  EXPECT_DOUBLE_EQ(ArchimedeanCopula(Family::Independence, 1, 2).cdf(half), 0.25);
  EXPECT_NEAR(ArchimedeanCopula(Family::Gumbel, 2, 2).cdf(half), std::exp(-std::sqrt(2.0) * std::log(2.0)), 1e-15);
  for (auto f : kFamilies) {
    std::vector<double> u(5, 1.0);
    u[2] = 0.3;
    EXPECT_NEAR(ArchimedeanCopula(f, 2.0, 5).cdf(u), 0.3, 1e-14) << to_string(f);
  }
}

TEST(Cdf, GumbelMatchesSamplingFrequency) {
  const ArchimedeanCopula c(Family::Gumbel, 2, 2);
  Rng rng(17);
  std::vector<double> u(2);
  int hits = 0;
  for (int i = 0; i < 100000; ++i) {
    c.sample_into(rng, u);
    hits += (u[0] <= 0.5 && u[1] <= 0.5);
  }
  EXPECT_NEAR(hits / 1e5, 0.3752, 0.01);
}

TEST(Cdf, FrechetBounds) {
  Rng rng(2);
  for (auto f : kFamilies) {
    for (std::size_t d : {2u, 5u, 50u}) {
      const ArchimedeanCopula c = f == Family::Independence ? ArchimedeanCopula(f, 1, d)
                                                            : ArchimedeanCopula::from_tau(f, 0.6, d);
      std::vector<double> u(d);
      for (int i = 0; i < 10000; ++i) {
        for (auto& x : u) x = std::pow(rng.uniform01(), 1.0 / d);  // keep C away from 0 in high d
        double lower = 1.0 - static_cast<double>(d), upper = 1.0;
        for (double x : u) {
          lower += x;
          upper = std::min(upper, x);
        }
        const double v = c.cdf(u);
        ASSERT_GE(v, std::max(lower, 0.0) - 1e-12) << to_string(f) << " d=" << d;
        ASSERT_LE(v, upper + 1e-12) << to_string(f) << " d=" << d;
      }
    }
  }
}

TEST(Cdf, DimensionMismatch) {
  const std::vector<double> u{0.5, 0.5, 0.5};
  EXPECT_THROW(ArchimedeanCopula(Family::Frank, 2, 2).cdf(u), coppit::DimensionMismatch);
}

TEST(Cdf, SampleFrequencyWithinThreeStandardErrors) {
  Rng rng(23);
  for (auto f : kParametric) {
    const auto c = ArchimedeanCopula::from_tau(f, 0.5, 3);
    const int n = 40000;
    std::vector<std::vector<double>> s = c.sample(rng, n);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> u(3);
      for (auto& x : u) x = 0.2 + 0.75 * rng.uniform01();
      int hits = 0;
      for (const auto& x : s) hits += (x[0] <= u[0] && x[1] <= u[1] && x[2] <= u[2]);
      const double p = c.cdf(u);
      const double se = std::sqrt(p * (1 - p) / n);
      EXPECT_NEAR(hits / double(n), p, 3 * se + 1e-9) << to_string(f);
    }
  }
}

TEST(TauTheta, ClosedFormFamilies) {
  EXPECT_NEAR(coppit::tau_to_theta(Family::Gumbel, 0.5), 2.0, 1e-15);
  EXPECT_NEAR(coppit::tau_to_theta(Family::Clayton, 1.0 / 3), 1.0, 1e-15);
}

TEST(TauTheta, RoundTrip) {
  for (auto f : kParametric)
    for (int i = 1; i <= 19; ++i) {
      const double tau = 0.05 * i;
      EXPECT_NEAR(coppit::theta_to_tau(f, coppit::tau_to_theta(f, tau)), tau, 1e-8) << to_string(f) << ' ' << tau;
    }
}

// tau(theta) = 1 + 2/(2 - theta) (psi(2) - psi(2/theta + 1)) for theta != 2
TEST(TauTheta, JoeAgreesWithDigammaForm) {
  for (double th : {1.2, 1.7, 3.0, 5.5, 12.0, 40.0}) {
    const double want = 1 + 2 / (2 - th) * (boost::math::digamma(2.0) - boost::math::digamma(2 / th + 1));
    EXPECT_NEAR(coppit::theta_to_tau(Family::Joe, th), want, 1e-9) << th;
  }
}

// tau(theta) = 1 - 4/theta + 4 D1(theta)/theta, D1 by composite Simpson
TEST(TauTheta, FrankAgreesWithDirectIntegration) {
  for (double th : {0.5, 2.0, 5.736, 20.0}) {
    const int n = 20000;
    double s = 0;
    for (int i = 0; i <= n; ++i) {
      const double t = th * i / n;
      const double f = t == 0 ? 1.0 : t / std::expm1(t);
      s += f * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
    }
    const double d1 = s * (th / n) / 3 / th;
    EXPECT_NEAR(coppit::theta_to_tau(Family::Frank, th), 1 - 4 / th + 4 * d1 / th, 1e-10) << th;
  }
}

TEST(TauTheta, RejectsOutOfRange) {
  for (auto f : kParametric) {
    EXPECT_THROW(coppit::tau_to_theta(f, 0.0), coppit::InvalidParameter);
    EXPECT_THROW(coppit::tau_to_theta(f, 1.0), coppit::InvalidParameter);
    EXPECT_THROW(coppit::tau_to_theta(f, -0.3), coppit::InvalidParameter);
  }
}

TEST(TauTheta, MonteCarloConcordance) {
  EXPECT_NEAR(mc_tau(ArchimedeanCopula(Family::Gumbel, 2, 2), 1, 100000), 0.5, 0.01);
  EXPECT_NEAR(mc_tau(ArchimedeanCopula(Family::Clayton, 1, 2), 2, 100000), 1.0 / 3, 0.01);
  EXPECT_NEAR(mc_tau(ArchimedeanCopula::from_tau(Family::Frank, 0.5, 2), 3, 100000), 0.5, 0.01);
  EXPECT_NEAR(mc_tau(ArchimedeanCopula::from_tau(Family::Joe, 0.5, 2), 4, 100000), 0.5, 0.01);
}

TEST(Sample, IndependenceIsUncorrelated) {
  const ArchimedeanCopula c(Family::Independence, 1, 2);
  Rng rng(5);
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  const int n = 10000;
  for (const auto& u : c.sample(rng, n)) {
    sx += u[0];
    sy += u[1];
    sxy += u[0] * u[1];
    sxx += u[0] * u[0];
    syy += u[1] * u[1];
  }
  const double cov = sxy / n - sx / n * sy / n;
  const double corr = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  EXPECT_NEAR(corr, 0.0, 0.03);
}

TEST(Sample, UniformMargins) {
  Rng rng(6);
  for (auto f : kFamilies) {
    const auto c = f == Family::Independence ? ArchimedeanCopula(f, 1, 3) : ArchimedeanCopula::from_tau(f, 0.7, 3);
    const auto s = c.sample(rng, 10000);
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<double> x;
      for (const auto& u : s) x.push_back(u[i]);
      EXPECT_LT(oracle::ks_distance(x, [](double t) { return t; }), oracle::ks_crit_1pct(x.size()))
          << to_string(f) << " margin " << i;
    }
  }
}

TEST(Sample, HighDimensionStaysInsideCube) {
  Rng rng(7);
  for (auto f : {Family::Frank, Family::Joe}) {
    const auto c = ArchimedeanCopula::from_tau(f, 0.95, 50);
    for (const auto& u : c.sample(rng, 500))
      for (double x : u) ASSERT_TRUE(x >= 0.0 && x <= 1.0);
  }
}

TEST(KendallBivariate, Examples) {
  EXPECT_NEAR(ArchimedeanCopula(Family::Gumbel, 2, 2).kendall_cdf_bivariate(0.5), 0.5 + 0.5 * std::log(2.0) / 2,
              1e-15);
  EXPECT_NEAR(ArchimedeanCopula(Family::Independence, 1, 2).kendall_cdf_bivariate(0.5), 0.5 - 0.5 * std::log(0.5),
              1e-15);
  EXPECT_NEAR(ArchimedeanCopula(Family::Clayton, 1, 2).kendall_cdf_bivariate(0.5), 0.75, 1e-15);
}

TEST(KendallBivariate, MatchesGeneratorFormula) {
  for (auto f : kParametric)
    for (double tau : {0.2, 0.5, 0.8}) {
      const auto c = ArchimedeanCopula::from_tau(f, tau, 2);
      for (double w = 0.02; w < 0.99; w += 0.03)
        EXPECT_NEAR(c.kendall_cdf_bivariate(w), w - c.generator(w) / c.generator_deriv(w), 1e-10)
            << to_string(f) << ' ' << tau << ' ' << w;
    }
}

TEST(KendallBivariate, BoundMonotoneEndpoints) {
  for (auto f : kFamilies)
    for (double tau : {0.1, 0.5, 0.9}) {
      const auto c = f == Family::Independence ? ArchimedeanCopula(f, 1, 2) : ArchimedeanCopula::from_tau(f, tau, 2);
      double prev = 0;
      for (int i = 0; i <= 1000; ++i) {
        const double w = i / 1000.0;
        const double k = c.kendall_cdf_bivariate(w);
        ASSERT_GE(k, w - 1e-15);
        ASSERT_GE(k, prev - 1e-15);
        prev = k;
      }
      EXPECT_EQ(c.kendall_cdf_bivariate(0.0), 0.0);
      EXPECT_EQ(c.kendall_cdf_bivariate(1.0), 1.0);
    }
}

TEST(KendallBivariate, RejectsHigherDimension) {
  EXPECT_THROW(ArchimedeanCopula(Family::Gumbel, 2, 3).kendall_cdf_bivariate(0.5), coppit::Unsupported);
}

TEST(OrthantCdf, InclusionExclusionSumsToOne) {
  Rng rng(8);
  for (auto f : kParametric) {
    const auto c = ArchimedeanCopula::from_tau(f, 0.4, 3);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> u(3);
      for (auto& x : u) x = rng.uniform01();
      double total = 0;
      for (int mask = 0; mask < 8; ++mask) {
        std::vector<int> s(3);
        for (int i = 0; i < 3; ++i) s[i] = (mask >> i) & 1 ? 1 : -1;
        total += c.orthant_cdf(u, s);
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Construction, ParameterDomains) {
  EXPECT_THROW(ArchimedeanCopula(Family::Gumbel, 0.5, 2), coppit::InvalidParameter);
  EXPECT_THROW(ArchimedeanCopula(Family::Joe, 0.9, 2), coppit::InvalidParameter);
  EXPECT_THROW(ArchimedeanCopula(Family::Frank, 0.0, 2), coppit::InvalidParameter);
  EXPECT_THROW(ArchimedeanCopula(Family::Clayton, -1.0, 3), coppit::InvalidParameter);
  EXPECT_THROW(ArchimedeanCopula(Family::Gumbel, 2.0, 1), coppit::InvalidParameter);
  EXPECT_EQ(coppit::family_from_string("frank"), Family::Frank);
  EXPECT_THROW(coppit::family_from_string("gauss"), coppit::InvalidParameter);
}
