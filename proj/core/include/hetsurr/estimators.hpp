#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hetsurr/smoothing.hpp"
#include "hetsurr/study.hpp"

namespace hetsurr {

enum class Method { Gold, P, H_simple, H_twostage, H_pooled, H_aug };

std::string_view to_string(Method m) noexcept;

struct EstimateWithSE {
  double estimate = 0.0;
  double se = 0.0;
  Method method = Method::Gold;
  std::size_t n1 = 0;
  std::size_t n0 = 0;
  /// Surface/curve evaluations answered by ClampToNearest.
  std::size_t clamped_points = 0;
};

/// Conditional mean of the prior control outcome given (S, W), estimated by a
/// product-kernel smoother with bandwidths (h2, h3). Built from prior control
/// data only.
class Mu0Surface {
 public:
  Mu0Surface(const StudyArm& prior_control, double h_s, double h_w, SmoothingConfig cfg);

  SmoothResult evaluate(double s, double w) const { return smoother_.evaluate(s, w); }
  double operator()(double s, double w) const { return smoother_(s, w); }

  double h_s() const noexcept { return smoother_.bandwidth_s(); }
  double h_w() const noexcept { return smoother_.bandwidth_w(); }
  const SmoothingConfig& config() const noexcept { return cfg_; }

 private:
  Smoother2D smoother_;
  SmoothingConfig cfg_;
};

/// Conditional mean of the prior control outcome given S alone (bandwidth h4).
class Mu0Curve {
 public:
  Mu0Curve(const StudyArm& prior_control, double h, SmoothingConfig cfg);

  SmoothResult evaluate(double s) const { return smoother_.evaluate(s); }
  double operator()(double s) const { return smoother_(s); }
  double h() const noexcept { return smoother_.bandwidth(); }
  const SmoothingConfig& config() const noexcept { return cfg_; }

 private:
  Smoother1D smoother_;
  SmoothingConfig cfg_;
};

/// Throws MissingPriorOutcome if the prior control arm is blinded.
Mu0Surface fit_mu0_surface(const PairedStudies& paired, const Bandwidths& bw, const SmoothingConfig& cfg);
Mu0Curve fit_mu0_curve(const PairedStudies& paired, const Bandwidths& bw, const SmoothingConfig& cfg);

struct TransformedArm {
  std::vector<double> values;
  std::size_t clamped = 0;
};

/// Surface value at every (s, w) of the arm. Under OobPolicy::Error all
/// failing indices are collected before OutOfSupport is thrown.
TransformedArm transform_arm(const Mu0Surface& surface, const StudyArm& arm);
TransformedArm transform_arm(const Mu0Curve& curve, const StudyArm& arm);

/// Kernel smooth, against arm.w, of the arm's transformed surrogate, at w0.
double m_hat(const StudyArm& arm, const Mu0Surface& surface, double w0, double h, const SmoothingConfig& cfg);

/// Everything the heterogeneity-aware estimators need from one current study:
/// transformed surrogates and both arm-specific smooths evaluated at every W
/// of both arms.
struct HetComponents {
  std::vector<double> st1, st0;          // surface at (S, W), treated / control
  std::vector<double> m1_at1, m1_at0;    // treated-arm smooth at treated / control W
  std::vector<double> m0_at1, m0_at0;    // control-arm smooth at treated / control W
  std::size_t clamped = 0;

  std::size_t n1() const noexcept { return st1.size(); }
  std::size_t n0() const noexcept { return st0.size(); }
};

HetComponents compute_components(const TwoArmStudy& current, const Mu0Surface& surface, const Bandwidths& bw,
                                 const SmoothingConfig& cfg);

EstimateWithSE delta_h_simple(const HetComponents& c);
EstimateWithSE delta_h_twostage(const HetComponents& c);
EstimateWithSE delta_h_pooled(const HetComponents& c);
EstimateWithSE delta_h_aug(const HetComponents& c);
double sigma_h(const HetComponents& c, double delta_h);
double sigma_aug(const HetComponents& c, double delta_h);

EstimateWithSE delta_h_simple(const PairedStudies& paired, const Mu0Surface& surface, const SmoothingConfig& cfg);
EstimateWithSE delta_h_twostage(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw,
                                const SmoothingConfig& cfg);
EstimateWithSE delta_h_pooled(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw,
                              const SmoothingConfig& cfg);
EstimateWithSE delta_h_aug(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw,
                           const SmoothingConfig& cfg);
double sigma_h(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw, double delta_h,
               const SmoothingConfig& cfg);
double sigma_aug(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw, double delta_h,
                 const SmoothingConfig& cfg);

EstimateWithSE delta_p(const TwoArmStudy& current, const Mu0Curve& curve);
EstimateWithSE delta_p(const PairedStudies& paired, const Mu0Curve& curve, const SmoothingConfig& cfg);

/// Difference in outcome means with the unpooled (Welch) standard error.
/// Throws MissingOutcome.
EstimateWithSE delta_gold(const TwoArmStudy& current);

/// Throws ZeroDenominator when the gold-standard estimate is zero.
double pte_ratio(const EstimateWithSE& delta_h, const EstimateWithSE& delta_gold);

}  // namespace hetsurr
