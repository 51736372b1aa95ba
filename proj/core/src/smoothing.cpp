#include "hetsurr/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "hetsurr/error.hpp"
#include "hetsurr/stats.hpp"

namespace hetsurr {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

void require_bandwidth(double h) {
  if (!(std::isfinite(h) && h > 0.0)) {
    throw Error(ErrorCode::NonPositiveBandwidth, "bandwidth must be finite and positive");
  }
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorCode::LengthMismatch, "smoother inputs have different lengths");
  if (a == 0) throw Error(ErrorCode::InvalidArgument, "smoother needs at least one observation");
}

[[noreturn]] void throw_out_of_support(double mass, const SmoothingConfig& cfg) {
  std::ostringstream msg;
  msg << "kernel mass " << mass << " below floor " << cfg.denom_floor << " at query point";
  throw Error(ErrorCode::OutOfSupport, msg.str());
}

// K(u) K(v) with a single exponential for the Gaussian case.
inline double product_profile(KernelKind kind, double u, double v) noexcept {
  if (kind == KernelKind::Gaussian) return kInvSqrt2Pi * kInvSqrt2Pi * std::exp(-0.5 * (u * u + v * v));
  return kernel_profile(kind, u) * kernel_profile(kind, v);
}

std::size_t nearest_1d(std::span<const double> xs, double x0) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double d = std::fabs(xs[i] - x0);
    const double b = std::fabs(xs[best] - x0);
    if (d < b || (d == b && xs[i] < xs[best])) best = i;
  }
  return best;
}

std::size_t nearest_2d(std::span<const double> ss, std::span<const double> ws, double h_s, double h_w, double s0,
                       double w0) {
  auto dist = [&](std::size_t i) {
    const double u = (ss[i] - s0) / h_s;
    const double v = (ws[i] - w0) / h_w;
    return u * u + v * v;
  };
  std::size_t best = 0;
  double best_d = dist(0);
  for (std::size_t i = 1; i < ss.size(); ++i) {
    const double d = dist(i);
    if (d < best_d || (d == best_d && std::tie(ss[i], ws[i]) < std::tie(ss[best], ws[best]))) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

SmoothResult direct_1d(std::span<const double> xs, std::span<const double> ys, double h, KernelKind kernel,
                       double x0, double floor, bool& ok) {
  CompensatedSum num, den;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double k = kernel_profile(kernel, (xs[i] - x0) / h);
    num += k * ys[i];
    den += k;
  }
  const double d = den.value();
  ok = d >= floor;
  return {ok ? num.value() / d : d, false};
}

SmoothResult direct_2d(std::span<const double> ss, std::span<const double> ws, std::span<const double> ys,
                       double h_s, double h_w, KernelKind kernel, double s0, double w0, double floor, bool& ok) {
  CompensatedSum num, den;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const double k = kernel_profile(kernel, (ss[i] - s0) / h_s) * kernel_profile(kernel, (ws[i] - w0) / h_w);
    num += k * ys[i];
    den += k;
  }
  const double d = den.value();
  ok = d >= floor;
  return {ok ? num.value() / d : d, false};
}

}  // namespace

std::string_view to_string(KernelKind k) noexcept {
  return k == KernelKind::Gaussian ? "gaussian" : "epanechnikov";
}

std::string_view to_string(OobPolicy p) noexcept { return p == OobPolicy::ClampToNearest ? "clamp" : "error"; }

KernelKind parse_kernel(std::string_view name) {
  if (name == "epanechnikov") return KernelKind::Epanechnikov;
  if (name == "gaussian") return KernelKind::Gaussian;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(name) + "'");
}

OobPolicy parse_oob_policy(std::string_view name) {
  if (name == "error") return OobPolicy::Error;
  if (name == "clamp") return OobPolicy::ClampToNearest;
  throw Error(ErrorCode::InvalidArgument, "unknown out-of-support policy '" + std::string(name) + "'");
}

double kernel_profile(KernelKind kind, double u) noexcept {
  switch (kind) {
    case KernelKind::Epanechnikov:
      return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelKind::Gaussian:
      return kInvSqrt2Pi * std::exp(-0.5 * u * u);
  }
  return 0.0;
}

double kernel_weight(KernelKind kind, double u, double h) {
  require_bandwidth(h);
  return kernel_profile(kind, u / h) / h;
}

// exp(-0.5 * 40^2) = exp(-800) underflows to exactly 0.
double kernel_support_radius(KernelKind kind) noexcept { return kind == KernelKind::Gaussian ? 40.0 : 1.0; }

RuleOfThumbDetail rule_of_thumb_detail(std::span<const double> values, std::size_t n_for_rate, double exponent,
                                       double multiplier) {
  if (values.size() < 2) throw Error(ErrorCode::DegenerateSpread, "need at least two values");
  if (n_for_rate == 0) throw Error(ErrorCode::InvalidArgument, "rate sample size must be positive");
  if (!(multiplier > 0.0)) throw Error(ErrorCode::InvalidArgument, "multiplier must be positive");
  RuleOfThumbDetail d;
  d.sd = sample_sd(values);
  d.iqr = iqr(values);
  if (d.sd == 0.0 || d.iqr == 0.0) {
    std::ostringstream msg;
    msg << "zero spread (sd=" << d.sd << ", IQR=" << d.iqr << ")";
    throw Error(ErrorCode::DegenerateSpread, msg.str());
  }
  d.n_for_rate = n_for_rate;
  d.exponent = exponent;
  d.multiplier = multiplier;
  d.bandwidth = multiplier * 1.06 * std::min(d.sd, d.iqr / 1.34) *
                std::pow(static_cast<double>(n_for_rate), exponent);
  return d;
}

double rule_of_thumb_bandwidth(std::span<const double> values, std::size_t n_for_rate, double exponent,
                               double multiplier) {
  return rule_of_thumb_detail(values, n_for_rate, exponent, multiplier).bandwidth;
}

BandwidthReport default_bandwidth_report(const PairedStudies& paired, KernelKind /*kernel*/) {
  auto named = [](const char* column, std::span<const double> v, std::size_t n, double e, double m) {
    try {
      return rule_of_thumb_detail(v, n, e, m);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::DegenerateSpread) throw;
      throw Error(ErrorCode::DegenerateSpread, std::string(column) + ": " + err.what());
    }
  };
  const auto& cur = paired.current;
  const auto& pc = paired.prior.control;
  BandwidthReport r;
  r.h0 = named("current control w", cur.control.w(), cur.n0(), -0.4, 1.0);
  r.h1 = named("current treated w", cur.treated.w(), cur.n1(), -0.4, 1.0);
  r.h2 = named("prior control s", pc.s(), pc.size(), -0.4, 2.0);
  r.h3 = named("prior control w", pc.w(), pc.size(), -0.4, 2.0);
  r.h4 = named("prior control s", pc.s(), pc.size(), -0.31, 1.0);
  r.bandwidths = {r.h0.bandwidth, r.h1.bandwidth, r.h2.bandwidth, r.h3.bandwidth, r.h4.bandwidth};
  return r;
}

Bandwidths default_bandwidths(const PairedStudies& paired, KernelKind kernel) {
  return default_bandwidth_report(paired, kernel).bandwidths;
}

SmoothResult nw_smooth_1d_detail(std::span<const double> xs, std::span<const double> ys, double h,
                                 KernelKind kernel, double x0, const SmoothingConfig& cfg) {
  require_same_length(xs.size(), ys.size());
  require_bandwidth(h);
  bool ok = false;
  auto r = direct_1d(xs, ys, h, kernel, x0, cfg.denom_floor, ok);
  if (ok) return r;
  if (cfg.oob == OobPolicy::Error) throw_out_of_support(r.value, cfg);
  r = direct_1d(xs, ys, h, kernel, xs[nearest_1d(xs, x0)], cfg.denom_floor, ok);
  if (!ok) throw_out_of_support(r.value, cfg);
  r.clamped = true;
  return r;
}

double nw_smooth_1d(std::span<const double> xs, std::span<const double> ys, double h, KernelKind kernel, double x0,
                    const SmoothingConfig& cfg) {
  return nw_smooth_1d_detail(xs, ys, h, kernel, x0, cfg).value;
}

SmoothResult nw_smooth_2d_detail(std::span<const double> ss, std::span<const double> ws, std::span<const double> ys,
                                 double h_s, double h_w, KernelKind kernel, double s0, double w0,
                                 const SmoothingConfig& cfg) {
  require_same_length(ss.size(), ws.size());
  require_same_length(ss.size(), ys.size());
  require_bandwidth(h_s);
  require_bandwidth(h_w);
  bool ok = false;
  auto r = direct_2d(ss, ws, ys, h_s, h_w, kernel, s0, w0, cfg.denom_floor, ok);
  if (ok) return r;
  if (cfg.oob == OobPolicy::Error) throw_out_of_support(r.value, cfg);
  const std::size_t j = nearest_2d(ss, ws, h_s, h_w, s0, w0);
  r = direct_2d(ss, ws, ys, h_s, h_w, kernel, ss[j], ws[j], cfg.denom_floor, ok);
  if (!ok) throw_out_of_support(r.value, cfg);
  r.clamped = true;
  return r;
}

double nw_smooth_2d(std::span<const double> ss, std::span<const double> ws, std::span<const double> ys, double h_s,
                    double h_w, KernelKind kernel, double s0, double w0, const SmoothingConfig& cfg) {
  return nw_smooth_2d_detail(ss, ws, ys, h_s, h_w, kernel, s0, w0, cfg).value;
}

// ---------------------------------------------------------------------------

Smoother1D::Smoother1D(std::span<const double> xs, std::span<const double> ys, double h, KernelKind kernel,
                       SmoothingConfig cfg)
    : h_(h), kernel_(kernel), cfg_(cfg) {
  require_same_length(xs.size(), ys.size());
  require_bandwidth(h);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::tie(xs[a], ys[a]) < std::tie(xs[b], ys[b]); });
  xs_.reserve(order.size());
  ys_.reserve(order.size());
  for (std::size_t i : order) {
    xs_.push_back(xs[i]);
    ys_.push_back(ys[i]);
  }
}

SmoothResult Smoother1D::evaluate_unclamped(double x0, bool& ok) const {
  const double reach = kernel_support_radius(kernel_) * h_;
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x0 - reach);
  CompensatedSum num, den;
  for (auto i = static_cast<std::size_t>(it - xs_.begin()); i < xs_.size() && xs_[i] <= x0 + reach; ++i) {
    const double k = kernel_profile(kernel_, (xs_[i] - x0) / h_);
    num += k * ys_[i];
    den += k;
  }
  const double d = den.value();
  ok = d >= cfg_.denom_floor;
  return {ok ? num.value() / d : d, false};
}

SmoothResult Smoother1D::evaluate(double x0) const {
  bool ok = false;
  auto r = evaluate_unclamped(x0, ok);
  if (ok) return r;
  if (cfg_.oob == OobPolicy::Error) throw_out_of_support(r.value, cfg_);
  // Sorted data: the nearest point is adjacent to the insertion position.
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x0);
  double nearest = 0.0;
  if (it == xs_.end()) {
    nearest = xs_.back();
  } else if (it == xs_.begin()) {
    nearest = *it;
  } else {
    const double hi = *it;
    const double lo = *(it - 1);
    nearest = (x0 - lo) <= (hi - x0) ? lo : hi;
  }
  r = evaluate_unclamped(nearest, ok);
  if (!ok) throw_out_of_support(r.value, cfg_);
  r.clamped = true;
  return r;
}

Smoother2D::Smoother2D(std::span<const double> ss, std::span<const double> ws, std::span<const double> ys,
                       double h_s, double h_w, KernelKind kernel, SmoothingConfig cfg)
    : h_s_(h_s), h_w_(h_w), kernel_(kernel), cfg_(cfg) {
  require_same_length(ss.size(), ws.size());
  require_same_length(ss.size(), ys.size());
  require_bandwidth(h_s);
  require_bandwidth(h_w);
  std::vector<std::size_t> order(ss.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(ss[a], ws[a], ys[a]) < std::tie(ss[b], ws[b], ys[b]);
  });
  ss_.reserve(order.size());
  ws_.reserve(order.size());
  ys_.reserve(order.size());
  for (std::size_t i : order) {
    ss_.push_back(ss[i]);
    ws_.push_back(ws[i]);
    ys_.push_back(ys[i]);
  }
}

SmoothResult Smoother2D::evaluate_unclamped(double s0, double w0, bool& ok) const {
  const double radius = kernel_support_radius(kernel_);
  const double reach = radius * h_s_;
  auto it = std::lower_bound(ss_.begin(), ss_.end(), s0 - reach);
  CompensatedSum num, den;
  for (auto i = static_cast<std::size_t>(it - ss_.begin()); i < ss_.size() && ss_[i] <= s0 + reach; ++i) {
    const double v = (ws_[i] - w0) / h_w_;
    if (std::fabs(v) > radius) continue;
    const double k = product_profile(kernel_, (ss_[i] - s0) / h_s_, v);
    num += k * ys_[i];
    den += k;
  }
  const double d = den.value();
  ok = d >= cfg_.denom_floor;
  return {ok ? num.value() / d : d, false};
}

SmoothResult Smoother2D::evaluate(double s0, double w0) const {
  bool ok = false;
  auto r = evaluate_unclamped(s0, w0, ok);
  if (ok) return r;
  if (cfg_.oob == OobPolicy::Error) throw_out_of_support(r.value, cfg_);
  const std::size_t j = nearest_2d(ss_, ws_, h_s_, h_w_, s0, w0);
  r = evaluate_unclamped(ss_[j], ws_[j], ok);
  if (!ok) throw_out_of_support(r.value, cfg_);
  r.clamped = true;
  return r;
}

}  // namespace hetsurr
