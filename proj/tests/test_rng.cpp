#include <gtest/gtest.h>

#include <cstdint>
#include <set>
#include <vector>

#include "coppit/rng.hpp"

using coppit::Rng;

TEST(Splitmix64, PublishedReferenceStream) {
  std::uint64_t s = 1234567;
  const std::vector<std::uint64_t> want{6457827717110365317ULL, 3203168211198807973ULL, 9817491932198370423ULL,
                                        4593380528125082431ULL, 16408922859458223821ULL};
  for (auto w : want) EXPECT_EQ(coppit::splitmix64(s), w);
}

TEST(Xoshiro, ReferenceOutputsFromRawState) {
  Rng r = Rng::from_state({1, 2, 3, 4});
  const std::vector<std::uint64_t> want{11520ULL, 0ULL, 1509978240ULL, 1215971899390074240ULL,
                                        1216172134540287360ULL};
  for (auto w : want) EXPECT_EQ(r.next(), w);
}

TEST(Uniform01, Seed42FirstTwoDistinctInRange) {
  Rng r(42);
  const double a = r.uniform01(), b = r.uniform01();
  EXPECT_NE(a, b);
  for (double x : {a, b}) {
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Uniform01, MeanOf1e5Draws) {
  Rng r(7);
  double s = 0;
  for (int i = 0; i < 100000; ++i) s += r.uniform01();
  EXPECT_NEAR(s / 1e5, 0.5, 0.005);
}

TEST(Uniform01, SameSeedSameStream) {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.uniform01(), b.uniform01());
}

TEST(Uniform01, OpenVariantNeverHitsEnds) {
  Rng r(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Substream, DependsOnEveryPathElement) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t a = 0; a < 4; ++a)
    for (std::uint64_t b = 0; b < 50; ++b) firsts.insert(Rng::substream(11, {a, b}).next());
  EXPECT_EQ(firsts.size(), 200u);
  EXPECT_EQ(Rng::substream(11, {1, 2}).next(), Rng::substream(11, {1, 2}).next());
  EXPECT_NE(Rng::substream(11, {1, 2}).next(), Rng::substream(12, {1, 2}).next());
  EXPECT_NE(Rng::substream(11, {1, 2}).next(), Rng::substream(11, {2, 1}).next());
}

TEST(UniformInt, StaysInRangeAndHitsEveryValue) {
  Rng r(5);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto x = r.uniform_int(3, 9);
    ASSERT_GE(x, 3u);
    ASSERT_LE(x, 9u);
    ++seen[x - 3];
  }
  for (int c : seen) EXPECT_GT(c, 800);
}
