#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hetsurr/error.hpp"
#include "report.hpp"

namespace hetsurr::cli {

struct CommonOptions {
  std::string kernel = "epanechnikov";
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  /// Empty means the command's default: "error" for data commands, "clamp"
  /// for simulate.
  std::string oob;
  std::filesystem::path out;
  bool timing = false;
};

struct TestOptions {
  CommonOptions common;
  std::filesystem::path prior;
  std::filesystem::path current;
  bool aug = false;
};

struct SimulateOptions {
  CommonOptions common;
  int setting = 0;
  std::size_t reps = 500;
  std::size_t n1p = 1000, n0p = 800, n1 = 300, n0 = 300;
  bool redraw_prior = false;
  std::size_t truth_draws = 1'000'000;
  bool replications_csv = false;
};

struct OracleOptions {
  CommonOptions common;
  std::string which;
  double p_female = 0.5;
  double delta0 = 0.5;
  /// Monte Carlo draws per arm for the lognormal oracle; 0 skips it.
  std::size_t mc = 0;
};

struct BandwidthOptions {
  CommonOptions common;
  std::filesystem::path prior;
  std::filesystem::path current;
};

struct GenerateOptions {
  int setting = 0;
  std::string side = "current";
  std::size_t n1 = 0, n0 = 0;  // 0: the setting's default sizes for that side
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  bool blind = false;
  std::filesystem::path file;
};

/// Each builder computes the report and writes the human-readable table to
/// `table`. They throw hetsurr::Error on failure and never touch the disk.
using TestRows = std::vector<std::pair<TestOutcome, EstimateWithSE>>;

ordered_json build_test_report(const TestOptions& o, std::ostream& table, TestRows* keep = nullptr);
ordered_json build_simulate_report(const SimulateOptions& o, std::ostream& table, SimulationSummary* keep = nullptr);
ordered_json build_oracle_report(const OracleOptions& o, std::ostream& table);
ordered_json build_bandwidths_report(const BandwidthOptions& o, std::ostream& table);

/// Build, print and (with --out) write the report files. Returns the process
/// exit code: 0 success, 1 data or numerical failure, 2 invalid arguments,
/// 3 I/O failure.
int run_test(const TestOptions& o, std::ostream& out, std::ostream& err);
int run_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err);
int run_oracle(const OracleOptions& o, std::ostream& out, std::ostream& err);
int run_bandwidths(const BandwidthOptions& o, std::ostream& out, std::ostream& err);

/// Writes one simulated study as CSV (to `out` when no file is given).
int run_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err);

int exit_code_for(const Error& e) noexcept;

}  // namespace hetsurr::cli
