#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetsurr/estimators.hpp"
#include "hetsurr/inference.hpp"
#include "hetsurr/smoothing.hpp"
#include "hetsurr/study.hpp"

namespace hetsurr {

/// One of the eight simulation configurations (1..8).
class SettingId {
 public:
  /// Throws UnknownSetting outside 1..8.
  explicit SettingId(int id);
  int value() const noexcept { return id_; }
  /// Settings 7 and 8 have no treatment effect.
  bool is_null() const noexcept { return id_ >= 7; }
  friend bool operator==(SettingId, SettingId) = default;

 private:
  int id_;
};

enum class StudySide { Prior, Current };

struct ArmSizes {
  std::size_t n1 = 300;
  std::size_t n0 = 300;
};

/// Replication index that identifies the fixed prior study's streams.
inline constexpr std::uint64_t kFixedPriorReplication = 0xFFFFFFFFFFFFFFFFULL;
/// Replication index of the streams used for Monte Carlo truth integrals.
inline constexpr std::uint64_t kTruthReplication = 0xFFFFFFFFFFFFFFFEULL;

/// Draws one study. Each (side, arm, variable) pulls from its own stream
/// derived from (master_seed, replication), so the W, S and noise sequences
/// are shared by settings that only differ in their outcome model.
TwoArmStudy generate_setting(SettingId setting, StudySide side, ArmSizes sizes, std::uint64_t master_seed,
                             std::uint64_t replication);

/// Population quantities of a setting's current study.
struct TrueDeltas {
  double delta = 0.0;    // effect on the primary outcome
  double delta_h = 0.0;  // heterogeneity-aware surrogate effect
  double delta_p = 0.0;  // surrogate effect ignoring W
};

/// Closed forms from the gamma means and uniform W laws.
TrueDeltas true_deltas(SettingId setting);
/// Monte Carlo evaluation of the same quantities from the generating law, with
/// exact conditional means; serves as a cross-check of the closed forms.
TrueDeltas true_deltas_mc(SettingId setting, std::size_t draws, std::uint64_t master_seed);

struct McValue {
  double value = 0.0;
  double mc_se = 0.0;
  std::size_t draws = 0;
  /// Evaluations answered by ClampToNearest.
  std::size_t clamped = 0;
  /// Draws dropped because the fit had no support there (OobPolicy::Error).
  std::size_t out_of_support = 0;
};

/// E{mu0(S1, W) - mu0(S0, W)} under the current-study law with the fitted
/// surface held fixed. W is shared between the two terms.
McValue tilde_delta_h(const Mu0Surface& surface, SettingId setting, std::size_t draws, std::uint64_t master_seed,
                      std::uint64_t replication = kTruthReplication);
/// Same for the W-free curve.
McValue tilde_delta_p(const Mu0Curve& curve, SettingId setting, std::size_t draws, std::uint64_t master_seed,
                      std::uint64_t replication = kTruthReplication);

struct SimConfig {
  int setting = 1;
  std::size_t n1p = 1000;
  std::size_t n0p = 800;
  std::size_t n1 = 300;
  std::size_t n0 = 300;
  std::size_t reps = 500;
  std::uint64_t master_seed = 1;
  double alpha = 0.05;
  bool fix_prior = true;
  /// Monte Carlo draws for the fixed-surface truths; 0 skips them.
  std::size_t truth_mc_draws = 1'000'000;
  SmoothingConfig smoothing{KernelKind::Epanechnikov, 1e-10, OobPolicy::ClampToNearest};
  std::size_t threads = 1;
  bool keep_replications = true;

  /// Throws InvalidArgument / UnknownSetting.
  void validate() const;
};

inline constexpr std::size_t kMethodCount = 6;

struct ReplicationRecord {
  std::size_t index = 0;
  bool failed = false;
  std::string error;
  /// Indexed by Method.
  std::array<EstimateWithSE, kMethodCount> estimates{};
  std::array<TestOutcome, kMethodCount> tests{};
  Bandwidths bandwidths;
  double support_overlap = 1.0;
  std::size_t clamped = 0;
  /// Per-replication truths when the prior is redrawn every replication.
  std::optional<double> tilde_h, tilde_p;
};

struct MethodSummary {
  Method method = Method::Gold;
  double truth = 0.0;
  std::optional<double> truth_tilde;
  double mean_estimate = 0.0;
  double bias = 0.0;
  std::optional<double> bias_tilde;
  double ese = 0.0;
  double ase = 0.0;
  double mean_effect_size = 0.0;
  double coverage = 0.0;
  std::optional<double> coverage_tilde;
  double power = 0.0;
};

struct SimulationSummary {
  SimConfig config;
  TrueDeltas truth;
  std::optional<McValue> tilde_h;
  std::optional<McValue> tilde_p;
  /// Bandwidths of the fixed prior (h2, h3, h4); h0/h1 vary per replication.
  std::optional<Bandwidths> prior_bandwidths;
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  std::size_t clamped_points = 0;
  /// Gold, P, H, then H_simple, H_twostage, H_aug.
  std::vector<MethodSummary> methods;
  /// Empirical SE of the pooled estimator over that of the simple one.
  double se_ratio_pooled_simple = 0.0;
  /// Same with the average reported SEs.
  double ase_ratio_pooled_simple = 0.0;
  std::vector<ReplicationRecord> replications;

  const MethodSummary& method(Method m) const;
};

/// Runs `reps` independent current studies against a prior study (fixed, or
/// redrawn per replication) and aggregates every estimator. Identical config
/// gives identical output at any thread count. Replications hitting
/// OutOfSupport are recorded as failed; more than 1% failures raises
/// TooManyFailures.
SimulationSummary run_simulation(const SimConfig& cfg);

}  // namespace hetsurr
