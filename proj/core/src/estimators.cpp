#include "hetsurr/estimators.hpp"

#include <cmath>
#include <sstream>

#include "hetsurr/error.hpp"
#include "hetsurr/stats.hpp"

namespace hetsurr {

namespace {

const StudyArm& prior_control_with_outcome(const PairedStudies& paired) {
  if (!paired.prior.control.has_outcome()) {
    throw Error(ErrorCode::MissingPriorOutcome, "prior study control arm must carry outcomes");
  }
  return paired.prior.control;
}

template <class Eval>
TransformedArm transform_points(const StudyArm& arm, const SmoothingConfig& cfg, Eval&& eval) {
  TransformedArm out;
  out.values.resize(arm.size());
  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < arm.size(); ++i) {
    try {
      const SmoothResult r = eval(arm.s()[i], arm.w()[i]);
      out.values[i] = r.value;
      if (r.clamped) ++out.clamped;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OutOfSupport || cfg.oob != OobPolicy::Error) throw;
      failed.push_back(i);
    }
  }
  if (!failed.empty()) {
    std::ostringstream msg;
    msg << failed.size() << " of " << arm.size() << " points outside the estimable support (indices";
    for (std::size_t k = 0; k < failed.size() && k < 10; ++k) msg << ' ' << failed[k];
    if (failed.size() > 10) msg << " ...";
    msg << ")";
    throw Error(ErrorCode::OutOfSupport, msg.str());
  }
  return out;
}

// sqrt(var1/n1 + var0/n0) with n-1 variances.
double two_sample_se(std::span<const double> a1, std::span<const double> a0) {
  return std::sqrt(sample_variance(a1) / static_cast<double>(a1.size()) +
                   sample_variance(a0) / static_cast<double>(a0.size()));
}

EstimateWithSE make(double estimate, double se, Method m, std::size_t n1, std::size_t n0, std::size_t clamped) {
  return EstimateWithSE{estimate, se, m, n1, n0, clamped};
}

std::vector<double> smooth_all(const Smoother1D& sm, std::span<const double> at, std::size_t& clamped) {
  std::vector<double> out(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    const SmoothResult r = sm.evaluate(at[i]);
    out[i] = r.value;
    if (r.clamped) ++clamped;
  }
  return out;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Gold: return "gold";
    case Method::P: return "P";
    case Method::H_simple: return "H_simple";
    case Method::H_twostage: return "H_twostage";
    case Method::H_pooled: return "H";
    case Method::H_aug: return "H_aug";
  }
  return "unknown";
}

Mu0Surface::Mu0Surface(const StudyArm& prior_control, double h_s, double h_w, SmoothingConfig cfg)
    : smoother_(prior_control.s(), prior_control.w(), prior_control.y(), h_s, h_w, cfg.kernel, cfg), cfg_(cfg) {}

Mu0Curve::Mu0Curve(const StudyArm& prior_control, double h, SmoothingConfig cfg)
    : smoother_(prior_control.s(), prior_control.y(), h, cfg.kernel, cfg), cfg_(cfg) {}

Mu0Surface fit_mu0_surface(const PairedStudies& paired, const Bandwidths& bw, const SmoothingConfig& cfg) {
  bw.validate();
  return Mu0Surface(prior_control_with_outcome(paired), bw.h2, bw.h3, cfg);
}

Mu0Curve fit_mu0_curve(const PairedStudies& paired, const Bandwidths& bw, const SmoothingConfig& cfg) {
  bw.validate();
  return Mu0Curve(prior_control_with_outcome(paired), bw.h4, cfg);
}

TransformedArm transform_arm(const Mu0Surface& surface, const StudyArm& arm) {
  return transform_points(arm, surface.config(),
                          [&](double s, double w) { return surface.evaluate(s, w); });
}

TransformedArm transform_arm(const Mu0Curve& curve, const StudyArm& arm) {
  return transform_points(arm, curve.config(), [&](double s, double) { return curve.evaluate(s); });
}

double m_hat(const StudyArm& arm, const Mu0Surface& surface, double w0, double h, const SmoothingConfig& cfg) {
  const TransformedArm t = transform_arm(surface, arm);
  return nw_smooth_1d(arm.w(), t.values, h, cfg.kernel, w0, cfg);
}

HetComponents compute_components(const TwoArmStudy& current, const Mu0Surface& surface, const Bandwidths& bw,
                                 const SmoothingConfig& cfg) {
  bw.validate();
  HetComponents c;
  TransformedArm t1 = transform_arm(surface, current.treated);
  TransformedArm t0 = transform_arm(surface, current.control);
  c.clamped = t1.clamped + t0.clamped;
  c.st1 = std::move(t1.values);
  c.st0 = std::move(t0.values);

  const Smoother1D m1(current.treated.w(), c.st1, bw.h1, cfg.kernel, cfg);
  const Smoother1D m0(current.control.w(), c.st0, bw.h0, cfg.kernel, cfg);
  c.m1_at1 = smooth_all(m1, current.treated.w(), c.clamped);
  c.m1_at0 = smooth_all(m1, current.control.w(), c.clamped);
  c.m0_at1 = smooth_all(m0, current.treated.w(), c.clamped);
  c.m0_at0 = smooth_all(m0, current.control.w(), c.clamped);
  return c;
}

EstimateWithSE delta_h_simple(const HetComponents& c) {
  return make(mean(c.st1) - mean(c.st0), two_sample_se(c.st1, c.st0), Method::H_simple, c.n1(), c.n0(),
              c.clamped);
}

EstimateWithSE delta_h_twostage(const HetComponents& c) {
  // Asymptotically equivalent to the simple estimator, so it shares its
  // standard error.
  return make(mean(c.m1_at1) - mean(c.m0_at0), two_sample_se(c.st1, c.st0), Method::H_twostage, c.n1(), c.n0(),
              c.clamped);
}

EstimateWithSE delta_h_pooled(const HetComponents& c) {
  const double n = static_cast<double>(c.n1() + c.n0());
  CompensatedSum acc;
  for (std::size_t i = 0; i < c.n0(); ++i) acc += c.m1_at0[i] - c.m0_at0[i];
  for (std::size_t i = 0; i < c.n1(); ++i) acc += c.m1_at1[i] - c.m0_at1[i];
  const double est = acc.value() / n;
  return make(est, sigma_h(c, est), Method::H_pooled, c.n1(), c.n0(), c.clamped);
}

double sigma_h(const HetComponents& c, double delta_h) {
  const double n1 = static_cast<double>(c.n1());
  const double n0 = static_cast<double>(c.n0());
  const double pi1 = n1 / (n1 + n0);
  const double pi0 = n0 / (n1 + n0);
  CompensatedSum a1, a0;
  for (std::size_t i = 0; i < c.n1(); ++i) {
    const double r = c.st1[i] - pi0 * c.m1_at1[i] - pi1 * c.m0_at1[i] - pi1 * delta_h;
    a1 += r * r;
  }
  for (std::size_t i = 0; i < c.n0(); ++i) {
    const double r = c.st0[i] - pi0 * c.m1_at0[i] - pi1 * c.m0_at0[i] - pi0 * delta_h;
    a0 += r * r;
  }
  return std::sqrt(a1.value() / (n1 * n1) + a0.value() / (n0 * n0));
}

EstimateWithSE delta_h_aug(const HetComponents& c) {
  const double n1 = static_cast<double>(c.n1());
  const double n0 = static_cast<double>(c.n0());
  const double pi1 = n1 / (n1 + n0);
  const double pi0 = n0 / (n1 + n0);
  CompensatedSum a1, a0;
  for (std::size_t i = 0; i < c.n1(); ++i) a1 += c.st1[i] - (pi0 * c.m1_at1[i] + pi1 * c.m0_at1[i]);
  for (std::size_t i = 0; i < c.n0(); ++i) a0 += c.st0[i] - (pi0 * c.m1_at0[i] + pi1 * c.m0_at0[i]);
  const double est = a1.value() / n1 - a0.value() / n0;
  const double pooled = delta_h_pooled(c).estimate;
  return make(est, sigma_aug(c, pooled), Method::H_aug, c.n1(), c.n0(), c.clamped);
}

double sigma_aug(const HetComponents& c, double delta_h) {
  const double n1 = static_cast<double>(c.n1());
  const double n0 = static_cast<double>(c.n0());
  const double pi1 = n1 / (n1 + n0);
  const double pi0 = n0 / (n1 + n0);
  CompensatedSum t1, t2, t3, t4;
  for (std::size_t i = 0; i < c.n1(); ++i) {
    const double r = c.st1[i] - c.m1_at1[i];
    const double d = c.m1_at1[i] - c.m0_at1[i] - delta_h;
    t1 += r * r;
    t3 += d * d;
  }
  for (std::size_t i = 0; i < c.n0(); ++i) {
    const double r = c.st0[i] - c.m0_at0[i];
    const double d = c.m1_at0[i] - c.m0_at0[i] - delta_h;
    t2 += r * r;
    t4 += d * d;
  }
  const double v = t1.value() / (n1 * n1) + t2.value() / (n0 * n0) + pi1 * pi1 * t3.value() / (n1 * n1) +
                   pi0 * pi0 * t4.value() / (n0 * n0);
  return std::sqrt(v);
}

EstimateWithSE delta_h_simple(const PairedStudies& paired, const Mu0Surface& surface, const SmoothingConfig& cfg) {
  (void)cfg;
  TransformedArm t1 = transform_arm(surface, paired.current.treated);
  TransformedArm t0 = transform_arm(surface, paired.current.control);
  return make(mean(t1.values) - mean(t0.values), two_sample_se(t1.values, t0.values), Method::H_simple,
              t1.values.size(), t0.values.size(), t1.clamped + t0.clamped);
}

EstimateWithSE delta_h_twostage(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw,
                                const SmoothingConfig& cfg) {
  return delta_h_twostage(compute_components(paired.current, surface, bw, cfg));
}

EstimateWithSE delta_h_pooled(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw,
                              const SmoothingConfig& cfg) {
  return delta_h_pooled(compute_components(paired.current, surface, bw, cfg));
}

EstimateWithSE delta_h_aug(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw,
                           const SmoothingConfig& cfg) {
  return delta_h_aug(compute_components(paired.current, surface, bw, cfg));
}

double sigma_h(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw, double delta_h,
               const SmoothingConfig& cfg) {
  return sigma_h(compute_components(paired.current, surface, bw, cfg), delta_h);
}

double sigma_aug(const PairedStudies& paired, const Mu0Surface& surface, const Bandwidths& bw, double delta_h,
                 const SmoothingConfig& cfg) {
  return sigma_aug(compute_components(paired.current, surface, bw, cfg), delta_h);
}

EstimateWithSE delta_p(const TwoArmStudy& current, const Mu0Curve& curve) {
  TransformedArm t1 = transform_arm(curve, current.treated);
  TransformedArm t0 = transform_arm(curve, current.control);
  return make(mean(t1.values) - mean(t0.values), two_sample_se(t1.values, t0.values), Method::P,
              t1.values.size(), t0.values.size(), t1.clamped + t0.clamped);
}

EstimateWithSE delta_p(const PairedStudies& paired, const Mu0Curve& curve, const SmoothingConfig& cfg) {
  (void)cfg;
  return delta_p(paired.current, curve);
}

EstimateWithSE delta_gold(const TwoArmStudy& current) {
  if (!current.treated.has_outcome() || !current.control.has_outcome()) {
    throw Error(ErrorCode::MissingOutcome, "gold-standard test needs outcomes in both current arms");
  }
  const auto y1 = current.treated.y();
  const auto y0 = current.control.y();
  return make(mean(y1) - mean(y0), two_sample_se(y1, y0), Method::Gold, y1.size(), y0.size(), 0);
}

double pte_ratio(const EstimateWithSE& delta_h, const EstimateWithSE& delta_gold) {
  if (delta_gold.estimate == 0.0) throw Error(ErrorCode::ZeroDenominator, "gold-standard estimate is zero");
  return delta_h.estimate / delta_gold.estimate;
}

}  // namespace hetsurr
