#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hetsurr/study.hpp"

namespace hetsurr {

enum class KernelKind { Epanechnikov, Gaussian };

/// What to do when the kernel mass around a query point falls below
/// `denom_floor`: fail, or re-evaluate at the nearest observed point.
enum class OobPolicy { Error, ClampToNearest };

std::string_view to_string(KernelKind k) noexcept;
std::string_view to_string(OobPolicy p) noexcept;
/// Accepts "epanechnikov"/"gaussian" and "error"/"clamp"; throws InvalidArgument.
KernelKind parse_kernel(std::string_view name);
OobPolicy parse_oob_policy(std::string_view name);

struct SmoothingConfig {
  KernelKind kernel = KernelKind::Epanechnikov;
  /// Minimum admissible sum of unscaled kernel values K(u_i).
  double denom_floor = 1e-10;
  OobPolicy oob = OobPolicy::Error;
};

/// K(u): 0.75(1-u^2) on |u| <= 1 for Epanechnikov, the standard normal
/// density for Gaussian.
double kernel_profile(KernelKind kind, double u) noexcept;

/// K_h(u) = K(u/h)/h. Throws NonPositiveBandwidth.
double kernel_weight(KernelKind kind, double u, double h);

/// Half-width, in bandwidth units, beyond which K(u) is exactly zero in
/// double precision.
double kernel_support_radius(KernelKind kind) noexcept;

struct RuleOfThumbDetail {
  double sd = 0.0;
  double iqr = 0.0;
  std::size_t n_for_rate = 0;
  double exponent = 0.0;
  double multiplier = 1.0;
  double bandwidth = 0.0;
};

/// multiplier * 1.06 * min(sd, IQR/1.34) * n_for_rate^exponent, sd with the
/// n-1 denominator and IQR from type-7 quantiles. Throws DegenerateSpread
/// when sd or IQR is zero.
RuleOfThumbDetail rule_of_thumb_detail(std::span<const double> values, std::size_t n_for_rate,
                                       double exponent, double multiplier);
double rule_of_thumb_bandwidth(std::span<const double> values, std::size_t n_for_rate, double exponent,
                               double multiplier);

struct BandwidthReport {
  Bandwidths bandwidths;
  RuleOfThumbDetail h0, h1, h2, h3, h4;
};

/// Rule-of-thumb bandwidths: h0/h1 from current control/treated W at rate
/// n^-2/5; h2/h3 from prior control S/W at n0p^-2/5 with an extra factor 2;
/// h4 from prior control S at n0p^-0.31. The DegenerateSpread message names
/// the offending column.
BandwidthReport default_bandwidth_report(const PairedStudies& paired, KernelKind kernel);
Bandwidths default_bandwidths(const PairedStudies& paired, KernelKind kernel);

struct SmoothResult {
  double value = 0.0;
  bool clamped = false;
};

/// Nadaraya-Watson average of ys at x0. Direct O(n) evaluation.
SmoothResult nw_smooth_1d_detail(std::span<const double> xs, std::span<const double> ys, double h,
                                 KernelKind kernel, double x0, const SmoothingConfig& cfg);
double nw_smooth_1d(std::span<const double> xs, std::span<const double> ys, double h, KernelKind kernel,
                    double x0, const SmoothingConfig& cfg);

/// Product-kernel Nadaraya-Watson average of ys at (s0, w0).
SmoothResult nw_smooth_2d_detail(std::span<const double> ss, std::span<const double> ws,
                                 std::span<const double> ys, double h_s, double h_w, KernelKind kernel,
                                 double s0, double w0, const SmoothingConfig& cfg);
double nw_smooth_2d(std::span<const double> ss, std::span<const double> ws, std::span<const double> ys,
                    double h_s, double h_w, KernelKind kernel, double s0, double w0,
                    const SmoothingConfig& cfg);

/// Repeated-query 1-D smoother. Keeps its own copy of the data sorted by x so
/// each query only visits points inside the kernel window; results are
/// identical for any permutation of the input rows.
class Smoother1D {
 public:
  Smoother1D(std::span<const double> xs, std::span<const double> ys, double h, KernelKind kernel,
             SmoothingConfig cfg);

  SmoothResult evaluate(double x0) const;
  double operator()(double x0) const { return evaluate(x0).value; }

  double bandwidth() const noexcept { return h_; }
  std::size_t size() const noexcept { return xs_.size(); }

 private:
  SmoothResult evaluate_unclamped(double x0, bool& ok) const;

  std::vector<double> xs_;
  std::vector<double> ys_;
  double h_;
  KernelKind kernel_;
  SmoothingConfig cfg_;
};

/// Repeated-query product-kernel smoother over (s, w), sorted by s.
class Smoother2D {
 public:
  Smoother2D(std::span<const double> ss, std::span<const double> ws, std::span<const double> ys, double h_s,
             double h_w, KernelKind kernel, SmoothingConfig cfg);

  SmoothResult evaluate(double s0, double w0) const;
  double operator()(double s0, double w0) const { return evaluate(s0, w0).value; }

  double bandwidth_s() const noexcept { return h_s_; }
  double bandwidth_w() const noexcept { return h_w_; }
  std::size_t size() const noexcept { return ss_.size(); }

 private:
  SmoothResult evaluate_unclamped(double s0, double w0, bool& ok) const;

  std::vector<double> ss_;
  std::vector<double> ws_;
  std::vector<double> ys_;
  double h_s_;
  double h_w_;
  KernelKind kernel_;
  SmoothingConfig cfg_;
};

}  // namespace hetsurr
