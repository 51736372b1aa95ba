#include <gtest/gtest.h>

#include <cmath>

#include "hetsurr/error.hpp"
#include "hetsurr/inference.hpp"

using namespace hetsurr;

TEST(Normal, CdfAndQuantile) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(normal_sf(8.0), 6.22096057427174e-16, 1e-27);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.995), 2.5758293035489004, 1e-12);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-9);
  for (double p : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999})
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14 + 1e-12 * p);
  EXPECT_THROW(normal_quantile(0.0), Error);
  EXPECT_THROW(normal_quantile(1.0), Error);
}

TEST(Wald, Basics) {
  EstimateWithSE e;
  e.estimate = 3.0;
  e.se = 1.5;
  e.method = Method::H_pooled;
  const auto t = wald_test(e);
  EXPECT_DOUBLE_EQ(t.z, 2.0);
  EXPECT_NEAR(t.p_value, 0.04550026389635839, 1e-14);
  EXPECT_TRUE(t.reject);
  EXPECT_NEAR(t.ci_lower, 3.0 - 1.959963984540054 * 1.5, 1e-12);
  EXPECT_NEAR(t.ci_upper, 3.0 + 1.959963984540054 * 1.5, 1e-12);
  EXPECT_EQ(t.method, Method::H_pooled);
  EXPECT_FALSE(wald_test(e, 0.01).reject);

  e.estimate = -3.0;
  EXPECT_NEAR(wald_test(e).p_value, 0.04550026389635839, 1e-14);
}

// Width ratio is z_{0.995} / z_{0.975} = 1.3142227734... (scipy).
TEST(Wald, IntervalWidthScalesWithQuantile) {
  EstimateWithSE e;
  e.estimate = 0.4;
  e.se = 0.9;
  const auto a = wald_test(e, 0.05), b = wald_test(e, 0.01);
  EXPECT_NEAR((b.ci_upper - b.ci_lower) / (a.ci_upper - a.ci_lower), 1.3142227734115084, 1e-12);
}

TEST(Wald, Errors) {
  EstimateWithSE e;
  e.estimate = 1.0;
  e.se = 0.0;
  try {
    wald_test(e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::ZeroSE);
  }
  e.se = 1.0;
  EXPECT_THROW(wald_test(e, 0.0), Error);
  EXPECT_THROW(wald_test(e, 1.0), Error);
}
