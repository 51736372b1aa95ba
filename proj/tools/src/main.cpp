// hetsurr: surrogate-marker treatment effect testing with heterogeneity in
// surrogate strength.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace hetsurr::cli;

const CLI::Validator kAtLeastOne(
    [](std::string& v) -> std::string {
      try {
        return std::stoll(v) >= 1 ? std::string() : "must be at least 1";
      } catch (const std::exception&) {
        return "must be a positive integer";
      }
    },
    "INT>=1");

void add_common(CLI::App* app, CommonOptions& c, bool with_seed, bool with_threads) {
  app->add_option("--kernel", c.kernel, "Smoothing kernel")
      ->check(CLI::IsMember({"epanechnikov", "gaussian"}))
      ->capture_default_str();
  app->add_option("--alpha", c.alpha, "Two-sided test level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app->add_option("--oob", c.oob, "Out-of-support policy (error | clamp)")
      ->check(CLI::IsMember({"error", "clamp"}));
  app->add_option("--out", c.out, "Directory for report.json and CSV summaries");
  app->add_flag("--timing", c.timing, "Record wall-clock time in report.json");
  if (with_seed) app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  if (with_threads)
    app->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
        ->check(kAtLeastOne)
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treatment effect testing with a surrogate marker whose strength varies with a baseline covariate"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI/TOML file of long flag names; subcommand flags go under [simulate], [test], ... "
                 "and command-line flags win");
  app.fallthrough();

  TestOptions test;
  auto* t = app.add_subcommand("test", "Estimate and test the treatment effect in a current study");
  t->add_option("--prior", test.prior, "Prior study CSV (z,s,w,y)")->required()->check(CLI::ExistingFile);
  t->add_option("--current", test.current, "Current study CSV (z,s,w[,y])")->required()->check(CLI::ExistingFile);
  t->add_flag("--aug", test.aug, "Also report the augmented estimator");
  add_common(t, test.common, false, false);

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Run a simulation setting (1-8) and summarize every estimator");
  s->add_option("--setting", sim.setting, "Setting 1..8")->required()->check(CLI::Range(1, 8));
  s->add_option("--reps", sim.reps, "Replications")->check(kAtLeastOne)->capture_default_str();
  s->add_option("--n1p", sim.n1p, "Prior treated size")->check(kAtLeastOne)->capture_default_str();
  s->add_option("--n0p", sim.n0p, "Prior control size")->check(kAtLeastOne)->capture_default_str();
  s->add_option("--n1", sim.n1, "Current treated size")->check(kAtLeastOne)->capture_default_str();
  s->add_option("--n0", sim.n0, "Current control size")->check(kAtLeastOne)->capture_default_str();
  s->add_flag("--redraw-prior", sim.redraw_prior, "Draw a new prior study in every replication");
  s->add_option("--truth-draws", sim.truth_draws, "Monte Carlo draws for the fixed-fit truths (0 skips)")
      ->capture_default_str();
  s->add_flag("--replications", sim.replications_csv, "Also write replications.csv");
  add_common(s, sim.common, true, true);

  OracleOptions orc;
  auto* o = app.add_subcommand("oracle", "Closed-form and Monte Carlo reference values");
  o->require_subcommand(1);
  auto* od = o->add_subcommand("discrete", "Two-group example with a binary covariate");
  od->add_option("--p-female", orc.p_female, "Share of the first group in the current study")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  add_common(od, orc.common, false, false);
  auto* ol = o->add_subcommand("lognormal", "Lognormal counterexample with identical covariate laws");
  ol->add_option("--delta0", orc.delta0, "Effect on the log surrogate")->capture_default_str();
  ol->add_option("--mc", orc.mc, "Monte Carlo draws per arm (0 = analytic only)")->capture_default_str();
  add_common(ol, orc.common, true, true);

  BandwidthOptions bw;
  auto* b = app.add_subcommand("bandwidths", "Show the rule-of-thumb bandwidths and their inputs");
  b->add_option("--prior", bw.prior, "Prior study CSV")->required()->check(CLI::ExistingFile);
  b->add_option("--current", bw.current, "Current study CSV")->required()->check(CLI::ExistingFile);
  add_common(b, bw.common, false, false);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write one simulated study as CSV");
  g->add_option("--setting", gen.setting, "Setting 1..8")->required()->check(CLI::Range(1, 8));
  g->add_option("--side", gen.side, "prior or current")
      ->check(CLI::IsMember({"prior", "current"}))
      ->capture_default_str();
  g->add_option("--n1", gen.n1, "Treated size (default 1000 prior, 300 current)");
  g->add_option("--n0", gen.n0, "Control size (default 800 prior, 300 current)");
  g->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  g->add_option("--replication", gen.replication,
                "Replication index (prior default: the fixed prior used by simulate)");
  g->add_flag("--blind", gen.blind, "Leave the outcome column empty");
  g->add_option("--file", gen.file, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*t) return run_test(test, std::cout, std::cerr);
  if (*s) return run_simulate(sim, std::cout, std::cerr);
  if (*od) {
    orc.which = "discrete";
    return run_oracle(orc, std::cout, std::cerr);
  }
  if (*ol) {
    orc.which = "lognormal";
    return run_oracle(orc, std::cout, std::cerr);
  }
  if (*b) return run_bandwidths(bw, std::cout, std::cerr);
  if (*g) return run_generate(gen, std::cout, std::cerr);
  return 2;
}
