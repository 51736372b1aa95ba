#include "report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "hetsurr/error.hpp"

namespace hetsurr::cli {

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64_hex(bytes);
}

std::string fmt_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

ordered_json to_json(const Bandwidths& bw) {
  return {{"h0", bw.h0}, {"h1", bw.h1}, {"h2", bw.h2}, {"h3", bw.h3}, {"h4", bw.h4}};
}

ordered_json to_json(const RuleOfThumbDetail& d) {
  return {{"sd", d.sd},
          {"iqr", d.iqr},
          {"n", d.n_for_rate},
          {"exponent", d.exponent},
          {"multiplier", d.multiplier},
          {"bandwidth", d.bandwidth}};
}

ordered_json to_json(const BandwidthReport& r) {
  ordered_json j = to_json(r.bandwidths);
  j["detail"] = {{"h0", to_json(r.h0)}, {"h1", to_json(r.h1)}, {"h2", to_json(r.h2)},
                 {"h3", to_json(r.h3)}, {"h4", to_json(r.h4)}};
  return j;
}

ordered_json to_json(const TestOutcome& t, const EstimateWithSE& e) {
  return {{"method", std::string(to_string(t.method))},
          {"available", true},
          {"estimate", t.estimate},
          {"se", t.se},
          {"z", t.z},
          {"p_value", t.p_value},
          {"alpha", t.alpha},
          {"reject", t.reject},
          {"ci_lower", t.ci_lower},
          {"ci_upper", t.ci_upper},
          {"n1", e.n1},
          {"n0", e.n0},
          {"clamped_points", e.clamped_points}};
}

ordered_json to_json(const SimConfig& c) {
  return {{"setting", c.setting},
          {"n1p", c.n1p},
          {"n0p", c.n0p},
          {"n1", c.n1},
          {"n0", c.n0},
          {"reps", c.reps},
          {"seed", c.master_seed},
          {"alpha", c.alpha},
          {"fix_prior", c.fix_prior},
          {"truth_mc_draws", c.truth_mc_draws},
          {"kernel", std::string(to_string(c.smoothing.kernel))},
          {"oob", std::string(to_string(c.smoothing.oob))},
          {"denom_floor", c.smoothing.denom_floor}};
}

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string opt_cell(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

ordered_json mc_json(const std::optional<McValue>& v) {
  if (!v) return nullptr;
  return {{"value", v->value},
          {"mc_se", v->mc_se},
          {"draws", v->draws},
          {"clamped", v->clamped},
          {"out_of_support", v->out_of_support}};
}

const char* table2_label(Method m) {
  switch (m) {
    case Method::Gold: return "Delta";
    case Method::P: return "Delta_P";
    default: return "Delta_H";
  }
}

}  // namespace

ordered_json to_json(const MethodSummary& m) {
  return {{"method", std::string(to_string(m.method))},
          {"truth", m.truth},
          {"truth_tilde", opt(m.truth_tilde)},
          {"mean_estimate", m.mean_estimate},
          {"bias", m.bias},
          {"bias_tilde", opt(m.bias_tilde)},
          {"ese", m.ese},
          {"ase", m.ase},
          {"effect_size", m.mean_effect_size},
          {"coverage", m.coverage},
          {"coverage_tilde", opt(m.coverage_tilde)},
          {"power", m.power}};
}

ordered_json to_json(const SimulationSummary& s) {
  ordered_json j;
  j["config"] = to_json(s.config);
  j["truth"] = {{"delta", s.truth.delta}, {"delta_h", s.truth.delta_h}, {"delta_p", s.truth.delta_p}};
  j["tilde_delta_h"] = mc_json(s.tilde_h);
  j["tilde_delta_p"] = mc_json(s.tilde_p);
  j["prior_bandwidths"] = s.prior_bandwidths ? to_json(*s.prior_bandwidths) : ordered_json(nullptr);
  j["replications_ok"] = s.n_ok;
  j["replications_failed"] = s.n_failed;
  j["clamped_points"] = s.clamped_points;
  j["se_ratio_pooled_simple"] = s.se_ratio_pooled_simple;
  j["ase_ratio_pooled_simple"] = s.ase_ratio_pooled_simple;
  ordered_json rows = ordered_json::array();
  for (const auto& m : s.methods) rows.push_back(to_json(m));
  j["methods"] = rows;
  return j;
}

ordered_json to_json(const OracleTriple& t) {
  return {{"delta", t.delta}, {"delta_p", t.delta_p}, {"delta_h", t.delta_h}};
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

CsvTable test_summary_csv(const std::vector<std::pair<TestOutcome, EstimateWithSE>>& rows) {
  CsvTable t;
  t.header = {"method", "estimate", "se", "z", "p_value", "ci_lower", "ci_upper", "reject", "n1", "n0"};
  for (const auto& [o, e] : rows)
    t.rows.push_back({std::string(to_string(o.method)), fmt_double(o.estimate), fmt_double(o.se), fmt_double(o.z),
                      fmt_double(o.p_value), fmt_double(o.ci_lower), fmt_double(o.ci_upper),
                      o.reject ? "1" : "0", std::to_string(e.n1), std::to_string(e.n0)});
  return t;
}

CsvTable simulation_summary_csv(const SimulationSummary& s) {
  CsvTable t;
  t.header = {"setting",   "method",        "truth",    "truth_tilde", "mean", "bias",
              "bias_tilde", "ese",          "ase",      "effect_size", "coverage", "coverage_tilde",
              "power"};
  for (const auto& m : s.methods)
    t.rows.push_back({std::to_string(s.config.setting), std::string(to_string(m.method)), fmt_double(m.truth),
                      opt_cell(m.truth_tilde), fmt_double(m.mean_estimate), fmt_double(m.bias),
                      opt_cell(m.bias_tilde), fmt_double(m.ese), fmt_double(m.ase), fmt_double(m.mean_effect_size),
                      fmt_double(m.coverage), opt_cell(m.coverage_tilde), fmt_double(m.power)});
  return t;
}

CsvTable table1_csv(const SimulationSummary& s) {
  const auto& h = s.method(Method::H_pooled);
  CsvTable t;
  t.header = {"setting", "estimate", "bias", "bias_tilde", "ese", "ase", "cov", "cov_tilde"};
  t.rows.push_back({std::to_string(s.config.setting), fmt_double(h.mean_estimate), fmt_double(h.bias),
                    opt_cell(h.bias_tilde), fmt_double(h.ese), fmt_double(h.ase), fmt_double(h.coverage),
                    opt_cell(h.coverage_tilde)});
  return t;
}

CsvTable table2_csv(const SimulationSummary& s) {
  CsvTable t;
  t.header = {"setting", "quantity", "estimate", "ese", "ase", "effect_size", "power"};
  for (Method m : {Method::Gold, Method::P, Method::H_pooled}) {
    const auto& r = s.method(m);
    t.rows.push_back({std::to_string(s.config.setting), table2_label(m), fmt_double(r.mean_estimate),
                      fmt_double(r.ese), fmt_double(r.ase), fmt_double(r.mean_effect_size), fmt_double(r.power)});
  }
  return t;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace hetsurr::cli
