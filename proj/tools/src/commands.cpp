#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "hetsurr/error.hpp"

namespace hetsurr::cli {

namespace {

SmoothingConfig smoothing_from(const CommonOptions& c, OobPolicy fallback) {
  SmoothingConfig cfg;
  cfg.kernel = parse_kernel(c.kernel);
  cfg.oob = c.oob.empty() ? fallback : parse_oob_policy(c.oob);
  return cfg;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "--alpha must lie in (0, 1)");
}

ordered_json header(std::string_view command) {
  ordered_json j;
  j["tool"] = "hetsurr";
  j["version"] = std::string(kToolVersion);
  j["command"] = std::string(command);
  return j;
}

ordered_json settings_json(const SmoothingConfig& cfg, double alpha, std::optional<std::uint64_t> seed) {
  ordered_json j = {{"kernel", std::string(to_string(cfg.kernel))},
                    {"oob", std::string(to_string(cfg.oob))},
                    {"denom_floor", cfg.denom_floor},
                    {"alpha", alpha}};
  j["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  return j;
}

ordered_json input_json(std::string_view role, const std::filesystem::path& p) {
  return {{"role", std::string(role)}, {"path", p.string()}, {"fnv1a64", file_digest(p)}};
}

void print_row(std::ostream& os, const TestOutcome& t) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-8s %11.4f %9.4f %8.3f %10.3g  [%9.4f, %9.4f]  %s\n",
                std::string(to_string(t.method)).c_str(), t.estimate, t.se, t.z, t.p_value, t.ci_lower, t.ci_upper,
                t.reject ? "reject" : "-");
  os << buf;
}

void print_test_header(std::ostream& os) {
  os << "method      estimate        se        z    p-value   confidence interval        H0\n";
}

PairedStudies load_pair(const std::filesystem::path& prior, const std::filesystem::path& current) {
  return validate_paired(load_study_csv(prior), load_study_csv(current));
}

template <class Opts>
int run_with(const Opts& o, std::ostream& out, std::ostream& err,
             const std::function<ordered_json(const Opts&, std::ostream&)>& build,
             const std::function<void(const ordered_json&)>& write_extra) {
  try {
    const auto t0 = std::chrono::steady_clock::now();
    ordered_json report = build(o, out);
    if (o.common.timing)
      report["timing_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.common.out.empty()) {
      write_text(o.common.out / "report.json", report.dump(2) + "\n");
      write_extra(report);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::OutOfSupport)
      err << "hint: --oob clamp evaluates such points at the nearest prior observation\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int exit_code_for(const Error& e) noexcept {
  switch (e.code()) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownSetting:
    case ErrorCode::NonPositiveDelta0: return 2;
    case ErrorCode::IoError: return 3;
    default: return 1;
  }
}

ordered_json build_test_report(const TestOptions& o, std::ostream& table, TestRows* keep) {
  check_alpha(o.common.alpha);
  const SmoothingConfig cfg = smoothing_from(o.common, OobPolicy::Error);
  const PairedStudies paired = load_pair(o.prior, o.current);
  const BandwidthReport bwr = default_bandwidth_report(paired, cfg.kernel);
  const Bandwidths& bw = bwr.bandwidths;

  const Mu0Surface surface = fit_mu0_surface(paired, bw, cfg);
  const Mu0Curve curve = fit_mu0_curve(paired, bw, cfg);
  const HetComponents comp = compute_components(paired.current, surface, bw, cfg);

  TestRows rows;
  auto add = [&](const EstimateWithSE& e) { rows.emplace_back(wald_test(e, o.common.alpha), e); };
  add(delta_h_pooled(comp));
  if (o.aug) add(delta_h_aug(comp));
  add(delta_p(paired, curve, cfg));
  const bool blinded = !paired.current.treated.has_outcome() || !paired.current.control.has_outcome();
  if (!blinded) add(delta_gold(paired.current));

  ordered_json j = header("test");
  j["settings"] = settings_json(cfg, o.common.alpha, std::nullopt);
  j["inputs"] = {input_json("prior", o.prior), input_json("current", o.current)};
  j["bandwidths"] = to_json(bwr);
  ordered_json results = ordered_json::array();
  for (const auto& [t, e] : rows) results.push_back(to_json(t, e));
  if (blinded)
    results.push_back({{"method", "gold"}, {"available", false}, {"reason", "unavailable: no outcome"}});
  j["results"] = results;
  std::size_t clamped = 0;
  for (const auto& r : rows) clamped += r.second.clamped_points;
  j["diagnostics"] = {{"support_overlap", paired.support_overlap},
                      {"clamped_points", clamped},
                      {"warnings", paired.warnings}};

  table << "prior: " << o.prior.string() << " (n1=" << paired.prior.n1() << ", n0=" << paired.prior.n0() << ")\n"
        << "current: " << o.current.string() << " (n1=" << paired.current.n1() << ", n0=" << paired.current.n0()
        << ")\n"
        << "kernel " << to_string(cfg.kernel) << ", alpha " << fmt_double(o.common.alpha) << "\n\n";
  print_test_header(table);
  for (const auto& r : rows) print_row(table, r.first);
  if (blinded) table << "gold     unavailable: no outcome\n";
  for (const auto& w : paired.warnings) table << "warning: " << w << "\n";
  if (keep) *keep = std::move(rows);
  return j;
}

ordered_json build_simulate_report(const SimulateOptions& o, std::ostream& table, SimulationSummary* keep) {
  check_alpha(o.common.alpha);
  SimConfig c;
  c.setting = o.setting;
  c.n1p = o.n1p;
  c.n0p = o.n0p;
  c.n1 = o.n1;
  c.n0 = o.n0;
  c.reps = o.reps;
  c.master_seed = o.common.seed;
  c.alpha = o.common.alpha;
  c.fix_prior = !o.redraw_prior;
  c.truth_mc_draws = o.truth_draws;
  c.smoothing = smoothing_from(o.common, OobPolicy::ClampToNearest);
  c.threads = o.common.threads;
  c.keep_replications = o.replications_csv || keep != nullptr;
  SimulationSummary s = run_simulation(c);

  ordered_json j = header("simulate");
  j["settings"] = settings_json(c.smoothing, c.alpha, c.master_seed);
  j["simulation"] = to_json(s);

  char buf[256];
  std::snprintf(buf, sizeof buf, "setting %d: %zu reps (%zu failed), prior %s, n=(%zu,%zu | %zu,%zu)\n", c.setting,
                c.reps, s.n_failed, c.fix_prior ? "fixed" : "redrawn", c.n1p, c.n0p, c.n1, c.n0);
  table << buf;
  std::snprintf(buf, sizeof buf, "truth: Delta %.4f  Delta_H %.4f  Delta_P %.4f", s.truth.delta, s.truth.delta_h,
                s.truth.delta_p);
  table << buf;
  if (s.tilde_h) {
    std::snprintf(buf, sizeof buf, "  tilde Delta_H %.4f (mc se %.4f)", s.tilde_h->value, s.tilde_h->mc_se);
    table << buf;
  }
  table << "\n\nmethod         mean     bias      ESE      ASE   effect     cov  cov~   power\n";
  for (const auto& m : s.methods) {
    char cov_tilde[16] = "-";
    if (m.coverage_tilde) std::snprintf(cov_tilde, sizeof cov_tilde, "%.3f", *m.coverage_tilde);
    std::snprintf(buf, sizeof buf, "%-10s %8.3f %8.3f %8.3f %8.3f %8.3f %7.3f %5s %7.3f\n",
                  std::string(to_string(m.method)).c_str(), m.mean_estimate, m.bias, m.ese, m.ase, m.mean_effect_size,
                  m.coverage, cov_tilde, m.power);
    table << buf;
  }
  std::snprintf(buf, sizeof buf, "\nESE ratio pooled/simple %.3f\n", s.se_ratio_pooled_simple);
  table << buf;
  if (keep) *keep = std::move(s);
  return j;
}

ordered_json build_oracle_report(const OracleOptions& o, std::ostream& table) {
  ordered_json j = header("oracle");
  char buf[256];
  if (o.which == "discrete") {
    const DiscreteOracle d = discrete_example({o.p_female});
    j["oracle"] = "discrete";
    j["p_female"] = o.p_female;
    j["analytic"] = to_json(d.triple);
    j["printed_study_c_delta_p"] = DiscreteOracle::kPrintedStudyCDeltaP;
    j["note"] =
        "Delta_P does not depend on the mix; the value printed for the 95%-male study (44.05) disagrees with the "
        "closed form";
    std::snprintf(buf, sizeof buf, "p_female %.4g\nDelta   %.6g\nDelta_P %.6g\nDelta_H %.6g\n", o.p_female,
                  d.triple.delta, d.triple.delta_p, d.triple.delta_h);
    table << buf;
    std::snprintf(buf, sizeof buf, "note: printed Delta_P for the 95%%-male study is %.2f; closed form gives %.6g\n",
                  DiscreteOracle::kPrintedStudyCDeltaP, d.triple.delta_p);
    table << buf;
    return j;
  }
  if (o.which == "lognormal") {
    const LognormalAnalytic a = lognormal_counterexample_analytic(o.delta0);
    j["oracle"] = "lognormal";
    j["delta0"] = o.delta0;
    j["analytic"] = to_json(a.triple);
    j["delta_p_printed"] = a.delta_p_printed;
    std::snprintf(buf, sizeof buf, "delta0 %.6g\n%-10s %12s %12s %12s\n", o.delta0, "", "analytic", "mc", "mc se");
    table << buf;
    if (o.mc == 0) {
      j["mc"] = nullptr;
      std::snprintf(buf, sizeof buf, "%-10s %12.5f\n%-10s %12.5f\n%-10s %12.5f\n%-10s %12.5f\n", "Delta",
                    a.triple.delta, "Delta_H", a.triple.delta_h, "Delta_P", a.triple.delta_p, "Delta_P*",
                    a.delta_p_printed);
      table << buf << "(* printed form)\n";
      return j;
    }
    const LognormalMc mc = lognormal_counterexample_mc(o.delta0, o.mc, o.common.seed, o.common.threads);
    auto within = [](double x, double target, double se) { return std::fabs(x - target) <= 3.0 * se; };
    const ordered_json flags = {
        {"delta_within_3se", within(mc.estimate.delta, a.triple.delta, mc.mc_se.delta)},
        {"delta_h_within_3se", within(mc.estimate.delta_h, a.triple.delta_h, mc.mc_se.delta_h)},
        {"delta_p_derived_within_3se", within(mc.estimate.delta_p, a.triple.delta_p, mc.mc_se.delta_p)},
        {"delta_p_printed_within_3se", within(mc.estimate.delta_p, a.delta_p_printed, mc.mc_se.delta_p)},
        {"delta_p_exceeds_delta", mc.estimate.delta_p > mc.estimate.delta}};
    j["mc"] = {{"n", mc.n}, {"seed", o.common.seed}, {"estimate", to_json(mc.estimate)},
               {"mc_se", to_json(mc.mc_se)}, {"agreement", flags}};
    auto row = [&](const char* name, double an, double est, double se) {
      std::snprintf(buf, sizeof buf, "%-10s %12.5f %12.5f %12.5f\n", name, an, est, se);
      table << buf;
    };
    row("Delta", a.triple.delta, mc.estimate.delta, mc.mc_se.delta);
    row("Delta_H", a.triple.delta_h, mc.estimate.delta_h, mc.mc_se.delta_h);
    row("Delta_P", a.triple.delta_p, mc.estimate.delta_p, mc.mc_se.delta_p);
    row("Delta_P*", a.delta_p_printed, mc.estimate.delta_p, mc.mc_se.delta_p);
    table << "(* printed form)\n";
    for (const auto& [k, v] : flags.items()) table << k << ": " << (v.get<bool>() ? "yes" : "no") << "\n";
    return j;
  }
  throw Error(ErrorCode::InvalidArgument, "oracle must be 'discrete' or 'lognormal'");
}

ordered_json build_bandwidths_report(const BandwidthOptions& o, std::ostream& table) {
  const KernelKind kernel = parse_kernel(o.common.kernel);
  const PairedStudies paired = load_pair(o.prior, o.current);
  const BandwidthReport r = default_bandwidth_report(paired, kernel);
  ordered_json j = header("bandwidths");
  j["settings"] = {{"kernel", std::string(to_string(kernel))}};
  j["inputs"] = {input_json("prior", o.prior), input_json("current", o.current)};
  j["bandwidths"] = to_json(r);
  j["diagnostics"] = {{"support_overlap", paired.support_overlap}, {"warnings", paired.warnings}};

  table << "kernel " << to_string(kernel) << "\n";
  table << "      source                 sd        IQR      n   rate  mult   bandwidth\n";
  const std::pair<const char*, const RuleOfThumbDetail*> rows[] = {
      {"h0    current control W", &r.h0}, {"h1    current treated W", &r.h1}, {"h2    prior control S  ", &r.h2},
      {"h3    prior control W  ", &r.h3}, {"h4    prior control S  ", &r.h4}};
  char buf[256];
  for (const auto& [name, d] : rows) {
    std::snprintf(buf, sizeof buf, "%s %9.4f %9.4f %6zu %6.2f %5.1f %11.6f\n", name, d->sd, d->iqr, d->n_for_rate,
                  d->exponent, d->multiplier, d->bandwidth);
    table << buf;
  }
  return j;
}

int run_test(const TestOptions& o, std::ostream& out, std::ostream& err) {
  TestRows rows;
  auto build = [&](const TestOptions& opts, std::ostream& table) { return build_test_report(opts, table, &rows); };
  return run_with<TestOptions>(o, out, err, build, [&](const ordered_json&) {
    write_text(o.common.out / "summary.csv", test_summary_csv(rows).str());
  });
}

int run_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  SimulationSummary s;
  auto build = [&](const SimulateOptions& opts, std::ostream& table) { return build_simulate_report(opts, table, &s); };
  return run_with<SimulateOptions>(o, out, err, build, [&](const ordered_json&) {
    write_text(o.common.out / "summary.csv", simulation_summary_csv(s).str());
    write_text(o.common.out / "table1.csv", table1_csv(s).str());
    write_text(o.common.out / "table2.csv", table2_csv(s).str());
    if (o.replications_csv) {
      CsvTable t;
      t.header = {"replication", "failed"};
      for (const char* m : {"gold", "P", "H_simple", "H_twostage", "H", "H_aug"}) {
        t.header.push_back(std::string(m) + "_estimate");
        t.header.push_back(std::string(m) + "_se");
      }
      for (const auto& r : s.replications) {
        std::vector<std::string> row = {std::to_string(r.index), r.failed ? "1" : "0"};
        for (std::size_t m = 0; m < kMethodCount; ++m) {
          row.push_back(r.failed ? "" : fmt_double(r.estimates[m].estimate));
          row.push_back(r.failed ? "" : fmt_double(r.estimates[m].se));
        }
        t.rows.push_back(std::move(row));
      }
      write_text(o.common.out / "replications.csv", t.str());
    }
  });
}

int run_oracle(const OracleOptions& o, std::ostream& out, std::ostream& err) {
  return run_with<OracleOptions>(o, out, err, build_oracle_report, [&](const ordered_json& report) {
    CsvTable t;
    t.header = {"quantity", "analytic", "mc", "mc_se"};
    const auto& a = report["analytic"];
    const bool has_mc = report.contains("mc") && !report["mc"].is_null();
    for (const char* k : {"delta", "delta_p", "delta_h"}) {
      t.rows.push_back({k, fmt_double(a[k].get<double>()),
                        has_mc ? fmt_double(report["mc"]["estimate"][k].get<double>()) : "",
                        has_mc ? fmt_double(report["mc"]["mc_se"][k].get<double>()) : ""});
    }
    if (report.contains("delta_p_printed"))
      t.rows.push_back({"delta_p_printed", fmt_double(report["delta_p_printed"].get<double>()), "", ""});
    write_text(o.common.out / "summary.csv", t.str());
  });
}

int run_bandwidths(const BandwidthOptions& o, std::ostream& out, std::ostream& err) {
  return run_with<BandwidthOptions>(o, out, err, build_bandwidths_report, [&](const ordered_json& report) {
    CsvTable t;
    t.header = {"bandwidth", "sd", "iqr", "n", "exponent", "multiplier", "value"};
    for (const char* k : {"h0", "h1", "h2", "h3", "h4"}) {
      const auto& d = report["bandwidths"]["detail"][k];
      t.rows.push_back({k, fmt_double(d["sd"].get<double>()), fmt_double(d["iqr"].get<double>()),
                        std::to_string(d["n"].get<std::size_t>()), fmt_double(d["exponent"].get<double>()),
                        fmt_double(d["multiplier"].get<double>()), fmt_double(d["bandwidth"].get<double>())});
    }
    write_text(o.common.out / "summary.csv", t.str());
  });
}

int run_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const SettingId setting(o.setting);
    const bool prior = o.side == "prior";
    if (!prior && o.side != "current") throw Error(ErrorCode::InvalidArgument, "--side must be prior or current");
    ArmSizes sizes = prior ? ArmSizes{1000, 800} : ArmSizes{300, 300};
    if (o.n1) sizes.n1 = o.n1;
    if (o.n0) sizes.n0 = o.n0;
    const std::uint64_t rep = prior && o.replication == 0 ? kFixedPriorReplication : o.replication;
    TwoArmStudy study =
        generate_setting(setting, prior ? StudySide::Prior : StudySide::Current, sizes, o.seed, rep);
    if (o.blind) study = {study.treated.blinded(), study.control.blinded(), study.label};
    const std::string text = format_study_csv(study);
    if (o.file.empty())
      out << text;
    else
      write_text(o.file, text);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace hetsurr::cli
