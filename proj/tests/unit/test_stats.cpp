#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hetsurr/error.hpp"
#include "hetsurr/stats.hpp"

using namespace hetsurr;

TEST(Stats, MeanVariance) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(mean(v), 3.0);
  EXPECT_DOUBLE_EQ(sample_variance(v), 2.5);
  EXPECT_DOUBLE_EQ(sample_sd(v), std::sqrt(2.5));
  const std::vector<double> one{4.0};
  EXPECT_EQ(sample_variance(one), 0.0);
  EXPECT_THROW(mean(std::vector<double>{}), Error);
}

TEST(Stats, QuantileType7) {
  // R: quantile(c(1, 2, 3, 4, 5, 10), c(.1, .25, .5, .75, .9))
  const std::vector<double> v{10, 3, 1, 5, 2, 4};
  EXPECT_NEAR(quantile(v, 0.10), 1.5, 1e-14);
  EXPECT_NEAR(quantile(v, 0.25), 2.25, 1e-14);
  EXPECT_NEAR(quantile(v, 0.50), 3.5, 1e-14);
  EXPECT_NEAR(quantile(v, 0.75), 4.75, 1e-14);
  EXPECT_NEAR(quantile(v, 0.90), 7.5, 1e-14);
  EXPECT_NEAR(iqr(v), 2.5, 1e-14);
  EXPECT_EQ(quantile(v, 0.0), 1.0);
  EXPECT_EQ(quantile(v, 1.0), 10.0);
  EXPECT_THROW(quantile(v, 1.5), Error);
}

TEST(Stats, CompensatedSum) {
  CompensatedSum s;
  s += 1e16;
  for (int i = 0; i < 1000; ++i) s += 1.0;
  s += -1e16;
  EXPECT_EQ(s.value(), 1000.0);
}
