#include "hetsurr/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>
#include <vector>

#include "hetsurr/error.hpp"
#include "hetsurr/rng.hpp"
#include "hetsurr/stats.hpp"

namespace hetsurr {

namespace {

constexpr double kES1 = 10.0;
constexpr double kES0 = 5.0;

// E(Y | S = s) by group and arm.
struct Line {
  double a, b;
  double at(double s) const { return a + b * s; }
};
constexpr Line kFemale1{3.0, 5.0}, kFemale0{1.0, 3.0};
constexpr Line kMale1{0.0, 15.0}, kMale0{0.0, 14.8};

void check_delta0(double delta0) {
  if (!(delta0 > 0.0) || !std::isfinite(delta0))
    throw Error(ErrorCode::NonPositiveDelta0, "delta0 must be a positive finite number");
}

constexpr std::size_t kChunk = 1u << 16;

// Running sums of one arm's three statistics: Y, S W and e^{1/4} S^{3/2}.
struct ArmSums {
  std::array<CompensatedSum, 3> sum, sum_sq;
  void add(std::size_t k, double x) {
    sum[k] += x;
    sum_sq[k] += x * x;
  }
  void merge(const ArmSums& o) {
    for (std::size_t k = 0; k < 3; ++k) {
      sum[k] += o.sum[k].value();
      sum_sq[k] += o.sum_sq[k].value();
    }
  }
};

ArmSums run_chunk(double delta0, std::uint64_t seed, std::size_t chunk, std::size_t count, int g) {
  // Tag 10g + {0: eps_W, 1: eps_S}; the chunk index plays the replication role.
  RandomStream ew(seed, chunk, 10u * g);
  RandomStream es(seed, chunk, 10u * g + 1);
  const double e14 = std::exp(0.25);
  ArmSums out;
  for (std::size_t i = 0; i < count; ++i) {
    const double w = std::exp(ew.normal());
    const double s = w * std::exp(delta0 * g + es.normal());
    const double y = s * w;
    out.add(0, y);
    out.add(1, s * w);
    out.add(2, e14 * s * std::sqrt(s));
  }
  return out;
}

}  // namespace

DiscreteOracle discrete_example(DiscreteMix mix) {
  const double p = mix.p_female;
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p_female must lie in [0, 1]");
  const double q = 1.0 - p;
  DiscreteOracle out;
  out.triple.delta = p * (kFemale1.at(kES1) - kFemale0.at(kES0)) + q * (kMale1.at(kES1) - kMale0.at(kES0));
  // The prior study fixes mu0(s) as the even mix of the two control lines.
  const Line pooled{0.5 * kFemale0.a + 0.5 * kMale0.a, 0.5 * kFemale0.b + 0.5 * kMale0.b};
  out.triple.delta_p = pooled.at(kES1) - pooled.at(kES0);
  out.triple.delta_h = p * (kFemale0.at(kES1) - kFemale0.at(kES0)) + q * (kMale0.at(kES1) - kMale0.at(kES0));
  return out;
}

LognormalAnalytic lognormal_counterexample_analytic(double delta0) {
  check_delta0(delta0);
  const double e52 = std::exp(2.5);
  LognormalAnalytic out;
  out.triple.delta = e52 * std::expm1(delta0);
  out.triple.delta_h = out.triple.delta;
  // E S(g)^{3/2} = exp(3 delta0 g / 2 + 9/4).
  out.triple.delta_p = e52 * std::expm1(1.5 * delta0);
  out.delta_p_printed = e52 * (1.5 * delta0 - 1.0);
  return out;
}

LognormalMc lognormal_counterexample_mc(double delta0, std::size_t n, std::uint64_t seed, std::size_t threads) {
  check_delta0(delta0);
  if (n < 1000) throw Error(ErrorCode::InvalidArgument, "Monte Carlo oracle needs n >= 1000");
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::array<ArmSums, 2>> parts(chunks);
  auto work = [&](std::size_t first) {
    for (std::size_t c = first; c < chunks; c += std::max<std::size_t>(1, threads)) {
      const std::size_t count = std::min(kChunk, n - c * kChunk);
      for (int g = 0; g < 2; ++g) parts[c][g] = run_chunk(delta0, seed, c, count, g);
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::array<ArmSums, 2> total;
  for (const auto& p : parts)
    for (int g = 0; g < 2; ++g) total[g].merge(p[g]);

  const double dn = static_cast<double>(n);
  std::array<double, 3> est{}, se{};
  for (std::size_t k = 0; k < 3; ++k) {
    double var_sum = 0.0;
    for (int g = 0; g < 2; ++g) {
      const double m = total[g].sum[k].value() / dn;
      const double v = std::max(0.0, (total[g].sum_sq[k].value() - dn * m * m) / (dn - 1.0));
      est[k] += g == 1 ? m : -m;
      var_sum += v / dn;
    }
    se[k] = std::sqrt(var_sum);
  }
  LognormalMc out;
  out.n = n;
  out.estimate = {est[0], est[2], est[1]};
  out.mc_se = {se[0], se[2], se[1]};
  return out;
}

}  // namespace hetsurr
