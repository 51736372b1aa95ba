#pragma once

#include "hetsurr/estimators.hpp"

namespace hetsurr {

/// Standard normal CDF.
double normal_cdf(double x) noexcept;
/// Upper tail 1 - Phi(x), accurate far into the tail.
double normal_sf(double x) noexcept;
/// Standard normal quantile for p in (0, 1); throws InvalidArgument otherwise.
double normal_quantile(double p);

struct TestOutcome {
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  Method method = Method::Gold;
};

/// Two-sided Wald test of a zero effect against the normal reference, with
/// the matching 100(1 - alpha)% interval. Throws ZeroSE or InvalidArgument.
TestOutcome wald_test(const EstimateWithSE& e, double alpha = 0.05);

}  // namespace hetsurr
