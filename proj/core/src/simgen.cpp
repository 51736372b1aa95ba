#include "hetsurr/simgen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "hetsurr/error.hpp"
#include "hetsurr/rng.hpp"
#include "hetsurr/stats.hpp"

namespace hetsurr {

namespace {

// Outcome model of one arm: Y = a + b*S + noise, with separate (a, b) for
// W < 5 ("low") and W >= 5 ("high").
struct ArmLaw {
  double shape, scale;
  double a_low, b_low, a_high, b_high;

  double mean_s() const { return shape * scale; }
  double mean_y(double s, double w) const { return w < 5.0 ? a_low + b_low * s : a_high + b_high * s; }
};

struct SettingLaw {
  ArmLaw treated, control;
  double cur_w_lo, cur_w_hi;
  double noise_var;
};

constexpr double kPriorWLo = 0.0;
constexpr double kPriorWHi = 10.0;
constexpr double kSplit = 5.0;

SettingLaw law_of(SettingId id) {
  // Shared outcome blocks.
  const ArmLaw het1{2.78, 2.78, 3.5, 5.0, 0.0, 16.0};
  const ArmLaw het0{2.5, 2.5, 3.2, 4.0, 0.0, 15.95};
  switch (id.value()) {
    case 1: return {het1, het0, 0.0, 4.0, 16.0};
    case 2: {
      ArmLaw t = het1;
      t.shape = t.scale = 2.66;
      return {t, het0, 6.0, 10.0, 16.0};
    }
    case 3: {
      // Below the split the outcome ignores S: 3.5 + 5*7 and 3.2 + 4*6.25.
      const ArmLaw t{2.66, 2.66, 3.5 + 5.0 * 7.0, 0.0, 0.0, 16.0};
      const ArmLaw c{2.5, 2.5, 3.2 + 4.0 * 6.25, 0.0, 0.0, 15.95};
      return {t, c, 6.0, 10.0, 16.0};
    }
    case 4: return {het1, het0, 0.0, 10.0, 16.0};
    case 5: return {{2.78, 2.78, 3.5, 5.0, 3.5, 5.0}, {2.5, 2.5, 3.2, 4.0, 3.2, 4.0}, 0.0, 10.0, 1.0};
    case 6: return {{3.0, 3.0, 3.5, 5.0, 0.0, 16.0}, {2.1, 2.2, 1.0, 3.0, 0.0, 15.8}, 0.0, 4.0, 1.0};
    case 7:
    case 8: {
      const ArmLaw null_arm{2.5, 2.5, 3.2, 4.0, 3.2, 4.0};
      return {null_arm, null_arm, 0.0, id.value() == 7 ? 10.0 : 4.0, 16.0};
    }
    default: throw Error(ErrorCode::UnknownSetting, "setting must be 1..8");
  }
}

// Stream tags: side (0 prior, 1 current, 2 truth integrals) * 100
// + arm (1 treated, 0 control) * 10 + variable (0 W, 1 S, 2 noise).
enum Variable : std::uint64_t { VarW = 0, VarS = 1, VarNoise = 2 };

std::uint64_t tag(std::uint64_t side, std::uint64_t arm, Variable v) { return side * 100 + arm * 10 + v; }

StudyArm draw_arm(const ArmLaw& law, double w_lo, double w_hi, double noise_var, std::size_t n,
                  std::uint64_t master, std::uint64_t rep, std::uint64_t side, std::uint64_t arm) {
  RandomStream w_rng(master, rep, tag(side, arm, VarW));
  RandomStream s_rng(master, rep, tag(side, arm, VarS));
  RandomStream e_rng(master, rep, tag(side, arm, VarNoise));
  std::vector<double> s(n), w(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = w_rng.uniform(w_lo, w_hi);
    s[i] = s_rng.gamma(law.shape, law.scale);
    y[i] = law.mean_y(s[i], w[i]) + e_rng.normal(0.0, noise_var);
  }
  return StudyArm(std::move(s), std::move(w), std::move(y));
}

double low_fraction(double lo, double hi) { return std::clamp((kSplit - lo) / (hi - lo), 0.0, 1.0); }

// Prior control regression averaged over the prior W law.
double mu0_marginal_slope(const SettingLaw& law) {
  const double p = low_fraction(kPriorWLo, kPriorWHi);
  return p * law.control.b_low + (1.0 - p) * law.control.b_high;
}

double mu0_marginal_intercept(const SettingLaw& law) {
  const double p = low_fraction(kPriorWLo, kPriorWHi);
  return p * law.control.a_low + (1.0 - p) * law.control.a_high;
}

McValue finish(const CompensatedSum& sum, const CompensatedSum& sum_sq, std::size_t used, std::size_t clamped,
               std::size_t oos) {
  McValue out;
  out.draws = used;
  out.clamped = clamped;
  out.out_of_support = oos;
  if (used == 0) throw Error(ErrorCode::OutOfSupport, "no Monte Carlo draw fell inside the fitted support");
  const double n = static_cast<double>(used);
  out.value = sum.value() / n;
  if (used > 1) {
    const double var = std::max(0.0, (sum_sq.value() - n * out.value * out.value) / (n - 1.0));
    out.mc_se = std::sqrt(var / n);
  }
  return out;
}

// Draws (W, S1, S0) from the current-study law with a common W and averages
// f(S1, W) - f(S0, W). Draws the fit cannot answer are counted and dropped.
template <class Eval>
McValue integrate_difference(SettingId setting, std::size_t draws, std::uint64_t master, std::uint64_t rep,
                             Eval&& eval) {
  if (draws == 0) throw Error(ErrorCode::InvalidArgument, "Monte Carlo draws must be positive");
  const SettingLaw law = law_of(setting);
  RandomStream w_rng(master, rep, tag(2, 0, VarW));
  RandomStream s1_rng(master, rep, tag(2, 1, VarS));
  RandomStream s0_rng(master, rep, tag(2, 0, VarS));
  CompensatedSum sum, sum_sq;
  std::size_t used = 0, clamped = 0, oos = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double w = w_rng.uniform(law.cur_w_lo, law.cur_w_hi);
    const double s1 = s1_rng.gamma(law.treated.shape, law.treated.scale);
    const double s0 = s0_rng.gamma(law.control.shape, law.control.scale);
    try {
      const SmoothResult a = eval(s1, w);
      const SmoothResult b = eval(s0, w);
      clamped += static_cast<std::size_t>(a.clamped) + static_cast<std::size_t>(b.clamped);
      const double d = a.value - b.value;
      sum += d;
      sum_sq += d * d;
      ++used;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OutOfSupport) throw;
      ++oos;
    }
  }
  return finish(sum, sum_sq, used, clamped, oos);
}

struct Moments {
  CompensatedSum sum, sum_sq;
  std::size_t n = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return n ? sum.value() / static_cast<double>(n) : 0.0; }
  double sd() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double dn = static_cast<double>(n);
    return std::sqrt(std::max(0.0, (sum_sq.value() - dn * m * m) / (dn - 1.0)));
  }
};

// Relative to the truth, except in the null settings where it is absolute.
double relative_bias(double mean, double truth, bool null_setting) {
  const double gap = std::fabs(mean - truth);
  return null_setting || truth == 0.0 ? gap : gap / std::fabs(truth);
}

bool covers(const TestOutcome& t, double truth) { return t.ci_lower <= truth && truth <= t.ci_upper; }

constexpr std::array<Method, kMethodCount> kSummaryOrder = {Method::Gold,     Method::P,          Method::H_pooled,
                                                            Method::H_simple, Method::H_twostage, Method::H_aug};

std::size_t idx(Method m) { return static_cast<std::size_t>(m); }

}  // namespace

SettingId::SettingId(int id) : id_(id) {
  if (id < 1 || id > 8) throw Error(ErrorCode::UnknownSetting, "setting must be 1..8, got " + std::to_string(id));
}

TwoArmStudy generate_setting(SettingId setting, StudySide side, ArmSizes sizes, std::uint64_t master_seed,
                             std::uint64_t replication) {
  const SettingLaw law = law_of(setting);
  const bool prior = side == StudySide::Prior;
  const double lo = prior ? kPriorWLo : law.cur_w_lo;
  const double hi = prior ? kPriorWHi : law.cur_w_hi;
  const std::uint64_t side_tag = prior ? 0 : 1;
  TwoArmStudy out{draw_arm(law.treated, lo, hi, law.noise_var, sizes.n1, master_seed, replication, side_tag, 1),
                  draw_arm(law.control, lo, hi, law.noise_var, sizes.n0, master_seed, replication, side_tag, 0),
                  std::string(prior ? "prior" : "current") + "-setting-" + std::to_string(setting.value())};
  return out;
}

TrueDeltas true_deltas(SettingId setting) {
  const SettingLaw law = law_of(setting);
  const double p = low_fraction(law.cur_w_lo, law.cur_w_hi);
  const double es1 = law.treated.mean_s();
  const double es0 = law.control.mean_s();
  const auto& t = law.treated;
  const auto& c = law.control;
  TrueDeltas d;
  d.delta = p * ((t.a_low + t.b_low * es1) - (c.a_low + c.b_low * es0)) +
            (1.0 - p) * ((t.a_high + t.b_high * es1) - (c.a_high + c.b_high * es0));
  d.delta_h = (p * c.b_low + (1.0 - p) * c.b_high) * (es1 - es0);
  d.delta_p = mu0_marginal_slope(law) * (es1 - es0);
  return d;
}

TrueDeltas true_deltas_mc(SettingId setting, std::size_t draws, std::uint64_t master_seed) {
  const SettingLaw law = law_of(setting);
  const double slope = mu0_marginal_slope(law);
  const double icpt = mu0_marginal_intercept(law);
  TrueDeltas d;
  // Exact conditional means under the current law, common W.
  RandomStream w_rng(master_seed, kTruthReplication, tag(2, 0, VarW));
  RandomStream s1_rng(master_seed, kTruthReplication, tag(2, 1, VarS));
  RandomStream s0_rng(master_seed, kTruthReplication, tag(2, 0, VarS));
  CompensatedSum dy, dh, dp;
  for (std::size_t i = 0; i < draws; ++i) {
    const double w = w_rng.uniform(law.cur_w_lo, law.cur_w_hi);
    const double s1 = s1_rng.gamma(law.treated.shape, law.treated.scale);
    const double s0 = s0_rng.gamma(law.control.shape, law.control.scale);
    dy += law.treated.mean_y(s1, w) - law.control.mean_y(s0, w);
    dh += law.control.mean_y(s1, w) - law.control.mean_y(s0, w);
    dp += (icpt + slope * s1) - (icpt + slope * s0);
  }
  const double n = static_cast<double>(draws);
  d.delta = dy.value() / n;
  d.delta_h = dh.value() / n;
  d.delta_p = dp.value() / n;
  return d;
}

McValue tilde_delta_h(const Mu0Surface& surface, SettingId setting, std::size_t draws, std::uint64_t master_seed,
                      std::uint64_t replication) {
  return integrate_difference(setting, draws, master_seed, replication,
                              [&](double s, double w) { return surface.evaluate(s, w); });
}

McValue tilde_delta_p(const Mu0Curve& curve, SettingId setting, std::size_t draws, std::uint64_t master_seed,
                      std::uint64_t replication) {
  return integrate_difference(setting, draws, master_seed, replication,
                              [&](double s, double) { return curve.evaluate(s); });
}

void SimConfig::validate() const {
  SettingId{setting};
  if (n1p == 0 || n0p == 0 || n1 == 0 || n0 == 0)
    throw Error(ErrorCode::InvalidArgument, "sample sizes must be positive");
  if (reps == 0) throw Error(ErrorCode::InvalidArgument, "reps must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (!(smoothing.denom_floor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "denominator floor must be >= 0");
}

const MethodSummary& SimulationSummary::method(Method m) const {
  for (const auto& row : methods)
    if (row.method == m) return row;
  throw Error(ErrorCode::InvalidArgument, "method not in summary");
}

namespace {

struct FixedPrior {
  TwoArmStudy study;
  std::optional<Mu0Surface> surface;
  std::optional<Mu0Curve> curve;
};

ReplicationRecord run_one(const SimConfig& cfg, SettingId setting, std::size_t r, const FixedPrior* fixed) {
  ReplicationRecord rec;
  rec.index = r;
  const std::uint64_t rep = static_cast<std::uint64_t>(r);
  try {
    TwoArmStudy prior = fixed ? fixed->study
                              : generate_setting(setting, StudySide::Prior, {cfg.n1p, cfg.n0p}, cfg.master_seed, rep);
    TwoArmStudy current = generate_setting(setting, StudySide::Current, {cfg.n1, cfg.n0}, cfg.master_seed, rep);
    const PairedStudies paired = validate_paired(std::move(prior), std::move(current));
    rec.support_overlap = paired.support_overlap;
    rec.bandwidths = default_bandwidths(paired, cfg.smoothing.kernel);

    std::optional<Mu0Surface> own_surface;
    std::optional<Mu0Curve> own_curve;
    if (!fixed) {
      own_surface.emplace(fit_mu0_surface(paired, rec.bandwidths, cfg.smoothing));
      own_curve.emplace(fit_mu0_curve(paired, rec.bandwidths, cfg.smoothing));
    }
    const Mu0Surface& surface = fixed ? *fixed->surface : *own_surface;
    const Mu0Curve& curve = fixed ? *fixed->curve : *own_curve;

    const HetComponents comp = compute_components(paired.current, surface, rec.bandwidths, cfg.smoothing);
    auto& est = rec.estimates;
    est[idx(Method::Gold)] = delta_gold(paired.current);
    est[idx(Method::P)] = delta_p(paired.current, curve);
    est[idx(Method::H_simple)] = delta_h_simple(comp);
    est[idx(Method::H_twostage)] = delta_h_twostage(comp);
    est[idx(Method::H_pooled)] = delta_h_pooled(comp);
    est[idx(Method::H_aug)] = delta_h_aug(comp);
    for (std::size_t m = 0; m < kMethodCount; ++m) rec.tests[m] = wald_test(est[m], cfg.alpha);
    rec.clamped = comp.clamped + est[idx(Method::P)].clamped_points;

    if (!fixed && cfg.truth_mc_draws > 0) {
      rec.tilde_h = tilde_delta_h(surface, setting, cfg.truth_mc_draws, cfg.master_seed, rep).value;
      rec.tilde_p = tilde_delta_p(curve, setting, cfg.truth_mc_draws, cfg.master_seed, rep).value;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OutOfSupport && e.code() != ErrorCode::ZeroSE) throw;
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

SimulationSummary run_simulation(const SimConfig& cfg) {
  cfg.validate();
  const SettingId setting(cfg.setting);
  SimulationSummary out;
  out.config = cfg;
  out.truth = true_deltas(setting);

  std::optional<FixedPrior> fixed;
  if (cfg.fix_prior) {
    fixed.emplace(FixedPrior{generate_setting(setting, StudySide::Prior, {cfg.n1p, cfg.n0p}, cfg.master_seed,
                                              kFixedPriorReplication),
                             std::nullopt, std::nullopt});
    // Prior-side bandwidths do not depend on the current study; any current
    // draw gives the same h2..h4.
    const PairedStudies probe = validate_paired(
        fixed->study, generate_setting(setting, StudySide::Current, {cfg.n1, cfg.n0}, cfg.master_seed, 0));
    const Bandwidths bw = default_bandwidths(probe, cfg.smoothing.kernel);
    out.prior_bandwidths = bw;
    fixed->surface.emplace(fit_mu0_surface(probe, bw, cfg.smoothing));
    fixed->curve.emplace(fit_mu0_curve(probe, bw, cfg.smoothing));
    if (cfg.truth_mc_draws > 0) {
      out.tilde_h = tilde_delta_h(*fixed->surface, setting, cfg.truth_mc_draws, cfg.master_seed);
      out.tilde_p = tilde_delta_p(*fixed->curve, setting, cfg.truth_mc_draws, cfg.master_seed);
    }
  }

  std::vector<ReplicationRecord> records(cfg.reps);
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(cfg.threads, cfg.reps));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= cfg.reps) return;
      try {
        records[r] = run_one(cfg, setting, r, fixed ? &*fixed : nullptr);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(cfg.reps);
        return;
      }
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Aggregation runs in replication order, so the result does not depend on
  // which thread finished first.
  for (const auto& rec : records) {
    if (rec.failed)
      ++out.n_failed;
    else
      ++out.n_ok;
    out.clamped_points += rec.clamped;
  }
  if (static_cast<double>(out.n_failed) > 0.01 * static_cast<double>(cfg.reps))
    throw Error(ErrorCode::TooManyFailures, std::to_string(out.n_failed) + " of " + std::to_string(cfg.reps) +
                                                " replications failed; first: " +
                                                std::find_if(records.begin(), records.end(), [](const auto& r) {
                                                  return r.failed;
                                                })->error);

  const auto truth_of = [&](Method m) {
    switch (m) {
      case Method::Gold: return out.truth.delta;
      case Method::P: return out.truth.delta_p;
      default: return out.truth.delta_h;
    }
  };
  const auto fixed_tilde_of = [&](Method m) -> std::optional<double> {
    if (m == Method::Gold) return std::nullopt;
    const auto& t = m == Method::P ? out.tilde_p : out.tilde_h;
    return t ? std::optional<double>(t->value) : std::nullopt;
  };
  const bool per_rep_tilde = !cfg.fix_prior && cfg.truth_mc_draws > 0;
  const bool null_setting = setting.is_null();

  double ese_pooled = 0.0, ese_simple = 0.0, ase_pooled = 0.0, ase_simple = 0.0;
  for (Method m : kSummaryOrder) {
    MethodSummary row;
    row.method = m;
    row.truth = truth_of(m);
    row.truth_tilde = fixed_tilde_of(m);
    Moments est, se, z, tilde_mean;
    std::size_t cover = 0, cover_tilde = 0, reject = 0;
    for (const auto& rec : records) {
      if (rec.failed) continue;
      const auto& e = rec.estimates[idx(m)];
      const auto& t = rec.tests[idx(m)];
      est.add(e.estimate);
      se.add(e.se);
      z.add(t.z);
      cover += covers(t, row.truth);
      reject += t.reject;
      std::optional<double> tilde = row.truth_tilde;
      if (per_rep_tilde && m != Method::Gold) tilde = m == Method::P ? rec.tilde_p : rec.tilde_h;
      if (tilde) {
        cover_tilde += covers(t, *tilde);
        tilde_mean.add(*tilde);
      }
    }
    const double n = static_cast<double>(est.n);
    row.mean_estimate = est.mean();
    row.bias = relative_bias(row.mean_estimate, row.truth, null_setting);
    row.ese = est.sd();
    row.ase = se.mean();
    row.mean_effect_size = z.mean();
    row.coverage = n > 0 ? cover / n : 0.0;
    row.power = n > 0 ? reject / n : 0.0;
    if (tilde_mean.n > 0) {
      if (per_rep_tilde) row.truth_tilde = tilde_mean.mean();
      // Averaging estimate minus its own replication's truth equals the
      // difference of the two means.
      row.bias_tilde = relative_bias(row.mean_estimate, *row.truth_tilde, null_setting);
      row.coverage_tilde = cover_tilde / n;
    }
    if (m == Method::H_pooled) {
      ese_pooled = row.ese;
      ase_pooled = row.ase;
    }
    if (m == Method::H_simple) {
      ese_simple = row.ese;
      ase_simple = row.ase;
    }
    out.methods.push_back(row);
  }
  out.se_ratio_pooled_simple = ese_simple > 0.0 ? ese_pooled / ese_simple : 0.0;
  out.ase_ratio_pooled_simple = ase_simple > 0.0 ? ase_pooled / ase_simple : 0.0;
  if (cfg.keep_replications) out.replications = std::move(records);
  return out;
}

}  // namespace hetsurr
