#include "hetsurr/stats.hpp"

#include <algorithm>
#include <vector>

#include "hetsurr/error.hpp"

namespace hetsurr {

double sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc += x;
  return acc.value();
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "mean of an empty sample");
  return sum(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  CompensatedSum acc;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc.value() / static_cast<double>(xs.size() - 1);
}

double sample_sd(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

double quantile(std::span<const double> xs, double p) {
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile level outside [0,1]");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double iqr(std::span<const double> xs) { return quantile(xs, 0.75) - quantile(xs, 0.25); }

}  // namespace hetsurr
