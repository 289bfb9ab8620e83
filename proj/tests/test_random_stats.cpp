#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "msn/parallel.hpp"
#include "msn/random.hpp"
#include "msn/special.hpp"
#include "msn/stats.hpp"

using namespace msn;

TEST(Rng, SameSeedSameStream)
{
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int k = 0; k < 100; ++k)
  {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs = differs || x != c();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, SplitIsDeterministicAndDistinct)
{
  const Rng master(7);
  EXPECT_EQ(master.split(3).seed(), Rng(7).split(3).seed());
  EXPECT_NE(master.split(3).seed(), master.split(4).seed());
  EXPECT_NE(master.split(0).seed(), master.seed());
  Rng s1 = master.split(1), s2 = master.split(1);
  for (int k = 0; k < 10; ++k)
    EXPECT_EQ(s1.normal(), s2.normal());
}

TEST(Rng, UniformAndNormalMoments)
{
  Rng rng(5);
  RunningStats u, z;
  for (int k = 0; k < 200000; ++k)
  {
    u.add(rng.uniform());
    z.add(rng.normal());
  }
  EXPECT_LT(std::abs(u.mean() - 0.5) / u.std_error(), 4.0);
  EXPECT_LT(std::abs(z.mean()) / z.std_error(), 4.0);
  EXPECT_NEAR(z.variance(), 1.0, 0.02);
}

TEST(RunningStats, MatchesTwoPassAndMerges)
{
  const std::vector<double> xs = {1.0, 4.0, -2.0, 7.5, 3.25, 0.0};
  RunningStats all, left, right;
  double s = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k)
  {
    all.add(xs[k]);
    (k < 2 ? left : right).add(xs[k]);
    s += xs[k];
  }
  const double m = s / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs)
    ss += (x - m) * (x - m);
  EXPECT_NEAR(all.mean(), m, 1e-14);
  EXPECT_NEAR(all.variance(), ss / 5.0, 1e-12);
  EXPECT_NEAR(all.std_error(), std::sqrt(ss / 5.0 / 6.0), 1e-12);
  left.merge(right);
  EXPECT_EQ(left.count(), 6u);
  EXPECT_NEAR(left.mean(), m, 1e-14);
  EXPECT_NEAR(left.variance(), ss / 5.0, 1e-12);
}

TEST(McEstimate, ZScoreWithZeroError)
{
  McEstimate e;
  e.value = 1.0;
  e.std_error = 0.0;
  EXPECT_EQ(e.z_score(1.0), 0.0);
  EXPECT_EQ(e.z_score(1.0 + 1e-14), 0.0);
  EXPECT_EQ(e.z_score(0.5), std::numeric_limits<double>::infinity());
  EXPECT_EQ(e.z_score(1.5), -std::numeric_limits<double>::infinity());
  e.std_error = 0.5;
  EXPECT_DOUBLE_EQ(e.z_score(0.0), 2.0);
}

TEST(McEstimate, DifferenceZ)
{
  McEstimate a{3.0, 0.3, 10, 0}, b{1.0, 0.4, 10, 0};
  EXPECT_DOUBLE_EQ(difference_z(a, b), 2.0 / 0.5);
}

TEST(Ks, OneSampleUniformAndShiftedNormal)
{
  Rng rng(9);
  std::vector<double> u(20000), z(20000);
  for (auto& x : u)
    x = rng.uniform();
  for (auto& x : z)
    x = rng.normal() + 0.1;
  const KsResult ru = ks_one_sample(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_GT(ru.p_value, 1e-4);
  const KsResult rz = ks_one_sample(z, normal_cdf);
  EXPECT_LT(rz.p_value, 1e-6);
}

TEST(Ks, TwoSampleStatisticByHand)
{
  // Samples {1,2,3} and {2.5,4}: the largest ECDF gap is 2/3 at x = 2.
  const KsResult r = ks_two_sample({1.0, 2.0, 3.0}, {2.5, 4.0});
  EXPECT_NEAR(r.statistic, 2.0 / 3.0, 1e-15);
  Rng rng(12);
  std::vector<double> a(5000), b(5000);
  for (auto& x : a)
    x = rng.normal();
  for (auto& x : b)
    x = rng.normal();
  EXPECT_GT(ks_two_sample(a, b).p_value, 1e-4);
}
