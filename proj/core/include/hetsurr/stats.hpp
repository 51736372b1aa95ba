#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace hetsurr {

// Neumaier-compensated accumulator. Sums of a few thousand terms agree with
// the exact sum to within one or two ulps regardless of term order.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double sum(std::span<const double> xs) noexcept;
double mean(std::span<const double> xs);

// Sample variance with the n-1 denominator; 0 for fewer than two values.
double sample_variance(std::span<const double> xs);
double sample_sd(std::span<const double> xs);

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile(std::span<const double> xs, double p);
double iqr(std::span<const double> xs);

}  // namespace hetsurr
