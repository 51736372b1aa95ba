#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hetsurr/estimators.hpp"
#include "hetsurr/inference.hpp"
#include "hetsurr/oracles.hpp"
#include "hetsurr/simgen.hpp"
#include "hetsurr/smoothing.hpp"

namespace hetsurr::cli {

using nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.1.0";

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a64_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double ("nan"/"inf" never occur in
/// reports; callers validate first).
std::string fmt_double(double x);

ordered_json to_json(const Bandwidths& bw);
ordered_json to_json(const RuleOfThumbDetail& d);
ordered_json to_json(const BandwidthReport& r);
ordered_json to_json(const TestOutcome& t, const EstimateWithSE& e);
ordered_json to_json(const SimConfig& c);
ordered_json to_json(const MethodSummary& m);
ordered_json to_json(const SimulationSummary& s);
ordered_json to_json(const OracleTriple& t);

/// Rows of a simple CSV table; every cell is written verbatim.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string str() const;
};

CsvTable test_summary_csv(const std::vector<std::pair<TestOutcome, EstimateWithSE>>& rows);
CsvTable simulation_summary_csv(const SimulationSummary& s);
/// Table-1 layout: one row for the heterogeneity-aware estimator.
CsvTable table1_csv(const SimulationSummary& s);
/// Table-2 layout: gold standard, W-free and heterogeneity-aware rows.
CsvTable table2_csv(const SimulationSummary& s);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace hetsurr::cli
