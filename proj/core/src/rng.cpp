#include "hetsurr/rng.hpp"

#include <cmath>

#include "hetsurr/error.hpp"
#include "hetsurr/inference.hpp"

namespace hetsurr {

double RandomStream::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_quantile(uniform()); }

double RandomStream::normal(double mean, double variance) { return mean + std::sqrt(variance) * normal(); }

double RandomStream::gamma(double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma needs positive shape and scale");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0, 1.0);
    return scale * g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

}  // namespace hetsurr
