#include "hetsurr/study.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hetsurr/error.hpp"

namespace hetsurr {

namespace {

void require_finite(std::span<const double> xs, const char* name) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) {
      throw Error(ErrorCode::NonFiniteValue,
                  std::string(name) + "[" + std::to_string(i) + "] is not finite");
    }
  }
}

std::string trim(std::string_view v) {
  const auto* ws = " \t\r";
  const auto b = v.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = v.find_last_not_of(ws);
  return std::string(v.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::MalformedCsv, "unterminated quote on line " + std::to_string(line_no));
  out.push_back(trim(cur));
  return out;
}

double parse_real(const std::string& field, const std::string& column, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range) {
    throw Error(ErrorCode::NonFiniteValue,
                "column '" + column + "' line " + std::to_string(line_no) + " overflows a double");
  }
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw Error(ErrorCode::MalformedCsv,
                "column '" + column + "' line " + std::to_string(line_no) + ": cannot parse '" + field + "'");
  }
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteValue,
                "column '" + column + "' line " + std::to_string(line_no) + " is not finite");
  }
  return v;
}

struct ArmBuffer {
  std::vector<double> s, w, y;
  std::size_t blank_y = 0;
};

StudyArm finish_arm(ArmBuffer& buf, bool has_y_column, const char* arm_name) {
  if (buf.s.empty()) throw Error(ErrorCode::EmptyArm, std::string(arm_name) + " arm has no rows");
  std::optional<std::vector<double>> y;
  if (has_y_column) {
    if (buf.blank_y == 0) {
      y = std::move(buf.y);
    } else if (buf.blank_y != buf.s.size()) {
      throw Error(ErrorCode::MixedOutcomePresence,
                  std::string(arm_name) + " arm has " + std::to_string(buf.blank_y) + " blank of " +
                      std::to_string(buf.s.size()) + " outcome cells");
    }
  }
  return StudyArm(std::move(buf.s), std::move(buf.w), std::move(y));
}

void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

}  // namespace

StudyArm::StudyArm(std::vector<double> s, std::vector<double> w, std::optional<std::vector<double>> y)
    : s_(std::move(s)), w_(std::move(w)), y_(std::move(y)) {
  if (s_.size() != w_.size() || (y_ && y_->size() != s_.size())) {
    throw Error(ErrorCode::LengthMismatch, "arm columns have different lengths");
  }
  if (s_.empty()) throw Error(ErrorCode::EmptyArm, "arm has no observations");
  require_finite(s_, "s");
  require_finite(w_, "w");
  if (y_) require_finite(*y_, "y");
}

std::span<const double> StudyArm::y() const {
  if (!y_) throw Error(ErrorCode::MissingOutcome, "arm carries no outcome");
  return *y_;
}

StudyArm StudyArm::blinded() const { return StudyArm(s_, w_, std::nullopt); }

void Bandwidths::validate() const {
  const std::array<double, 5> all{h0, h1, h2, h3, h4};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!(std::isfinite(all[i]) && all[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveBandwidth, "h" + std::to_string(i) + " must be finite and positive");
    }
  }
}

Bandwidths Bandwidths::scaled(double factor) const {
  return {h0 * factor, h1 * factor, h2 * factor, h3 * factor, h4 * factor};
}

PairedStudies validate_paired(TwoArmStudy prior, TwoArmStudy current) {
  if (!prior.control.has_outcome()) {
    throw Error(ErrorCode::MissingPriorOutcome, "prior study control arm must carry outcomes");
  }
  const auto ps = prior.control.s();
  const auto pw = prior.control.w();
  const auto [smin, smax] = std::minmax_element(ps.begin(), ps.end());
  const auto [wmin, wmax] = std::minmax_element(pw.begin(), pw.end());

  std::size_t inside = 0;
  for (const StudyArm* arm : {&current.treated, &current.control}) {
    for (std::size_t i = 0; i < arm->size(); ++i) {
      const double s = arm->s()[i];
      const double w = arm->w()[i];
      if (s >= *smin && s <= *smax && w >= *wmin && w <= *wmax) ++inside;
    }
  }
  PairedStudies out{std::move(prior), std::move(current), 0.0, {}};
  out.support_overlap = static_cast<double>(inside) / static_cast<double>(out.current.n());
  if (inside < out.current.n()) {
    std::ostringstream msg;
    msg << (out.current.n() - inside) << " of " << out.current.n()
        << " current (s, w) pairs fall outside the prior control support box; "
           "surface values there are extrapolated";
    out.warnings.push_back(msg.str());
  }
  return out;
}

TwoArmStudy parse_study_csv(const std::string& text, const CsvSchema& schema, const std::string& label) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(line, line_no);
      break;
    }
  }
  if (header.empty()) throw Error(ErrorCode::MalformedCsv, "missing header row");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto iz = find_col(schema.z);
  const auto is = find_col(schema.s);
  const auto iw = find_col(schema.w);
  const auto iy = find_col(schema.y);
  for (const auto& [idx, name] : {std::pair{iz, schema.z}, std::pair{is, schema.s}, std::pair{iw, schema.w}}) {
    if (!idx) throw Error(ErrorCode::MissingColumn, "required column '" + name + "' not found");
  }

  ArmBuffer arms[2];
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, line_no);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) + " has " +
                                               std::to_string(fields.size()) + " fields, expected " +
                                               std::to_string(header.size()));
    }
    const double z = parse_real(fields[*iz], schema.z, line_no);
    if (z != 0.0 && z != 1.0) {
      throw Error(ErrorCode::InvalidTreatmentCode,
                  "line " + std::to_string(line_no) + ": treatment code must be 0 or 1, got '" + fields[*iz] + "'");
    }
    auto& arm = arms[z == 1.0 ? 1 : 0];
    arm.s.push_back(parse_real(fields[*is], schema.s, line_no));
    arm.w.push_back(parse_real(fields[*iw], schema.w, line_no));
    if (iy) {
      if (fields[*iy].empty() || fields[*iy] == "NA") {
        ++arm.blank_y;
        arm.y.push_back(0.0);
      } else {
        arm.y.push_back(parse_real(fields[*iy], schema.y, line_no));
      }
    }
  }
  StudyArm treated = finish_arm(arms[1], iy.has_value(), "treated");
  StudyArm control = finish_arm(arms[0], iy.has_value(), "control");
  return TwoArmStudy{std::move(treated), std::move(control), label};
}

TwoArmStudy load_study_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_study_csv(buf.str(), schema, path.filename().string());
}

std::string format_study_csv(const TwoArmStudy& study, const CsvSchema& schema) {
  const bool with_y = study.treated.has_outcome() || study.control.has_outcome();
  std::string out = schema.z + "," + schema.s + "," + schema.w;
  if (with_y) out += "," + schema.y;
  out += "\n";
  for (int z : {1, 0}) {
    const StudyArm& arm = z == 1 ? study.treated : study.control;
    for (std::size_t i = 0; i < arm.size(); ++i) {
      out += z == 1 ? "1," : "0,";
      append_number(out, arm.s()[i]);
      out += ",";
      append_number(out, arm.w()[i]);
      if (with_y) {
        out += ",";
        if (arm.has_outcome()) append_number(out, arm.y()[i]);
      }
      out += "\n";
    }
  }
  return out;
}

void write_study_csv(const std::filesystem::path& path, const TwoArmStudy& study, const CsvSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << format_study_csv(study, schema);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace hetsurr
