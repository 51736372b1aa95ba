#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hetsurr {

/// Observations from one treatment arm: surrogate `s`, baseline covariate `w`
/// and, when measured, the primary outcome `y`. Immutable once built.
class StudyArm {
 public:
  /// Throws LengthMismatch, EmptyArm or NonFiniteValue.
  StudyArm(std::vector<double> s, std::vector<double> w,
           std::optional<std::vector<double>> y = std::nullopt);

  std::size_t size() const noexcept { return s_.size(); }
  std::span<const double> s() const noexcept { return s_; }
  std::span<const double> w() const noexcept { return w_; }
  bool has_outcome() const noexcept { return y_.has_value(); }
  /// Throws MissingOutcome when the arm is blinded.
  std::span<const double> y() const;

  /// Same observations with the outcome removed.
  StudyArm blinded() const;

  friend bool operator==(const StudyArm&, const StudyArm&) = default;

 private:
  std::vector<double> s_;
  std::vector<double> w_;
  std::optional<std::vector<double>> y_;
};

struct TwoArmStudy {
  StudyArm treated;
  StudyArm control;
  std::string label;

  std::size_t n1() const noexcept { return treated.size(); }
  std::size_t n0() const noexcept { return control.size(); }
  std::size_t n() const noexcept { return n1() + n0(); }

  friend bool operator==(const TwoArmStudy&, const TwoArmStudy&) = default;
};

/// A prior study whose control arm carries outcomes, paired with the current
/// study in which the surrogate-based test is run.
struct PairedStudies {
  TwoArmStudy prior;
  TwoArmStudy current;
  /// Fraction of current (s, w) pairs inside the bounding box of the prior
  /// control arm.
  double support_overlap = 1.0;
  std::vector<std::string> warnings;
};

/// Throws MissingPriorOutcome when the prior control arm has no outcomes.
PairedStudies validate_paired(TwoArmStudy prior, TwoArmStudy current);

/// h0/h1 smooth current-study W (control/treated), h2/h3 smooth prior control
/// S and W for the two-dimensional surface, h4 smooths prior control S alone.
struct Bandwidths {
  double h0 = 1.0;
  double h1 = 1.0;
  double h2 = 1.0;
  double h3 = 1.0;
  double h4 = 1.0;

  /// Throws NonPositiveBandwidth unless every entry is finite and > 0.
  void validate() const;
  Bandwidths scaled(double factor) const;
};

struct CsvSchema {
  std::string z = "z";
  std::string s = "s";
  std::string w = "w";
  std::string y = "y";
};

TwoArmStudy parse_study_csv(const std::string& text, const CsvSchema& schema = {},
                            const std::string& label = "study");
TwoArmStudy load_study_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Treated rows first, then control rows; numbers use the shortest
/// representation that parses back to the same double.
std::string format_study_csv(const TwoArmStudy& study, const CsvSchema& schema = {});
void write_study_csv(const std::filesystem::path& path, const TwoArmStudy& study,
                     const CsvSchema& schema = {});

}  // namespace hetsurr
