#pragma once

#include <cstddef>
#include <cstdint>

namespace hetsurr {

struct OracleTriple {
  double delta = 0.0;
  double delta_p = 0.0;
  double delta_h = 0.0;
};

/// Two-group population: a binary covariate (female / male) with group
/// specific outcome regressions and covariate-free surrogate laws,
/// E S(1) = 10, E S(0) = 5. The prior study is an even mix.
struct DiscreteMix {
  double p_female = 0.5;
};

struct DiscreteOracle {
  OracleTriple triple;
  /// Delta_P value printed for the 5%-female study in the source material.
  static constexpr double kPrintedStudyCDeltaP = 44.05;
};

/// Closed forms in p = p_female. Throws InvalidArgument unless p in [0, 1].
DiscreteOracle discrete_example(DiscreteMix mix);

/// log W ~ N(0, 1), S(g) = W exp(delta0 g + eps), Y(g) = S(g) W.
struct LognormalAnalytic {
  OracleTriple triple;  // delta_p from the lognormal moments
  /// e^{5/2} (3 delta0 / 2 - 1), as printed in the source material.
  double delta_p_printed = 0.0;
};

/// Throws NonPositiveDelta0.
LognormalAnalytic lognormal_counterexample_analytic(double delta0);

struct LognormalMc {
  OracleTriple estimate;
  OracleTriple mc_se;
  std::size_t n = 0;
};

/// Simulates n draws per arm (independent arms) and evaluates the exact
/// conditional means mu0(s, w) = s w and mu0(s) = e^{1/4} s^{3/2}. Draws are
/// produced in fixed-size chunks, each on its own stream, so the result does
/// not depend on `threads`. Throws NonPositiveDelta0 / InvalidArgument (n < 1000).
LognormalMc lognormal_counterexample_mc(double delta0, std::size_t n, std::uint64_t seed, std::size_t threads = 1);

}  // namespace hetsurr
