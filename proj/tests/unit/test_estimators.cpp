#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hetsurr/error.hpp"
#include "hetsurr/estimators.hpp"
#include "hetsurr/simgen.hpp"
#include "hetsurr/smoothing.hpp"
#include "../support/naive.hpp"

using namespace hetsurr;

namespace {

const SmoothingConfig kEpan{KernelKind::Epanechnikov, 1e-10, OobPolicy::Error};

// Five prior control points; current arms of three and two. Bandwidths are
// wide enough that every kernel evaluation below has mass.
struct Fixture {
  std::vector<naive::Point> prior{
      {0.2, 0.1, 1.0}, {1.1, 0.4, 2.5}, {0.7, 1.3, 1.7}, {1.6, 1.8, 4.1}, {0.4, 0.9, 0.6}};
  naive::Arm t{{0.5, 1.4, 0.9}, {0.3, 1.1, 1.7}};
  naive::Arm c{{0.3, 1.2}, {0.8, 0.2}};
  Bandwidths bw{2.0, 2.0, 3.0, 3.0, 2.0};

  PairedStudies paired() const {
    std::vector<double> s, w, y;
    for (const auto& p : prior) {
      s.push_back(p.s);
      w.push_back(p.w);
      y.push_back(p.y);
    }
    TwoArmStudy pr{StudyArm({1.0, 2.0}, {0.5, 0.5}, std::vector<double>{1, 2}), StudyArm(s, w, y), "prior"};
    // Current arms carry no outcome.
    TwoArmStudy cur{StudyArm(t.s, t.w), StudyArm(c.s, c.w), "current"};
    return validate_paired(pr, cur);
  }
};

}  // namespace

TEST(Estimators, MatchNaiveDoubleLoop) {
  const Fixture f;
  const auto paired = f.paired();
  const auto surf = fit_mu0_surface(paired, f.bw, kEpan);
  const auto curve = fit_mu0_curve(paired, f.bw, kEpan);
  const auto ref = naive::all(f.prior, f.bw.h2, f.bw.h3, f.bw.h4, f.t, f.c, f.bw.h1, f.bw.h0);
  const auto comp = compute_components(paired.current, surf, f.bw, kEpan);
  EXPECT_EQ(comp.clamped, 0u);

  const auto s = delta_h_simple(comp);
  EXPECT_NEAR(s.estimate, ref.simple, 1e-10);
  EXPECT_NEAR(s.se, ref.simple_se, 1e-10);
  EXPECT_NEAR(delta_h_twostage(comp).estimate, ref.twostage, 1e-10);
  const auto h = delta_h_pooled(comp);
  EXPECT_NEAR(h.estimate, ref.pooled, 1e-10);
  EXPECT_NEAR(h.se, ref.sigma_h, 1e-10);
  const auto a = delta_h_aug(comp);
  EXPECT_NEAR(a.estimate, ref.aug, 1e-10);
  EXPECT_NEAR(a.se, ref.sigma_aug, 1e-10);
  const auto p = delta_p(paired, curve, kEpan);
  EXPECT_NEAR(p.estimate, ref.p, 1e-10);
  EXPECT_NEAR(p.se, ref.p_se, 1e-10);

  // The study-level entry points agree with the component path.
  EXPECT_DOUBLE_EQ(delta_h_pooled(paired, surf, f.bw, kEpan).estimate, h.estimate);
  EXPECT_DOUBLE_EQ(delta_h_simple(paired, surf, kEpan).estimate, s.estimate);
  EXPECT_DOUBLE_EQ(sigma_h(paired, surf, f.bw, h.estimate, kEpan), h.se);
  EXPECT_DOUBLE_EQ(sigma_aug(paired, surf, f.bw, h.estimate, kEpan), a.se);
  EXPECT_EQ(h.n1, 3u);
  EXPECT_EQ(h.n0, 2u);
}

TEST(Estimators, MHatHandFixture) {
  // A narrow-in-w surface reproduces y = w at the three points, so m_hat is
  // the 1-D hand fixture (0, 1, 2 smoothed at 0.5 with h = 1.5).
  const std::vector<double> ss{5, 5, 5}, ws{0, 1, 2}, ys{0, 1, 2};
  const StudyArm prior_ctrl(ss, ws, ys);
  const Mu0Surface surf(prior_ctrl, 1.0, 0.01, kEpan);
  const StudyArm arm({5, 5, 5}, {0, 1, 2});
  EXPECT_NEAR(m_hat(arm, surf, 0.5, 1.5, kEpan), 0.5, 1e-9);
}

TEST(Estimators, NullInvarianceOnIdenticalArms) {
  const auto prior = generate_setting(SettingId(5), StudySide::Prior, {1000, 800}, 4, 0);
  const auto cur = generate_setting(SettingId(5), StudySide::Current, {300, 300}, 4, 0);
  const TwoArmStudy same{cur.treated.blinded(), cur.treated.blinded(), "same"};
  const auto paired = validate_paired(prior, same);
  const SmoothingConfig cfg{KernelKind::Epanechnikov, 1e-10, OobPolicy::ClampToNearest};
  auto bw = default_bandwidths(paired, KernelKind::Epanechnikov);
  const auto surf = fit_mu0_surface(paired, bw, cfg);
  const auto comp = compute_components(paired.current, surf, bw, cfg);
  EXPECT_EQ(delta_h_simple(comp).estimate, 0.0);
  EXPECT_NEAR(delta_h_twostage(comp).estimate, 0.0, 1e-12);
  EXPECT_NEAR(delta_h_pooled(comp).estimate, 0.0, 1e-12);
  EXPECT_NEAR(delta_h_aug(comp).estimate, 0.0, 1e-12);
  EXPECT_EQ(delta_p(paired, fit_mu0_curve(paired, bw, cfg), cfg).estimate, 0.0);
}

TEST(Estimators, PriorOutcomeShiftCancels) {
  const Fixture f;
  auto paired = f.paired();
  const auto base = delta_h_pooled(paired, fit_mu0_surface(paired, f.bw, kEpan), f.bw, kEpan).estimate;
  const auto& pc = paired.prior.control;
  std::vector<double> y(pc.y().begin(), pc.y().end());
  for (auto& v : y) v += 123.5;
  paired.prior.control = StudyArm({pc.s().begin(), pc.s().end()}, {pc.w().begin(), pc.w().end()}, y);
  const auto surf = fit_mu0_surface(paired, f.bw, kEpan);
  EXPECT_NEAR(delta_h_pooled(paired, surf, f.bw, kEpan).estimate, base, 1e-10);
}

TEST(Estimators, WideCurrentBandwidthsRecoverSimple) {
  const Fixture f;
  const auto paired = f.paired();
  Bandwidths bw = f.bw;
  bw.h0 = bw.h1 = 1e8;
  const auto surf = fit_mu0_surface(paired, bw, kEpan);
  const auto comp = compute_components(paired.current, surf, bw, kEpan);
  EXPECT_NEAR(delta_h_twostage(comp).estimate, delta_h_simple(comp).estimate, 1e-9);
  EXPECT_NEAR(delta_h_pooled(comp).estimate, delta_h_simple(comp).estimate, 1e-9);
}

TEST(Estimators, ConstantSurfaceGivesZero) {
  const StudyArm ctrl({0, 1, 2, 3}, {0, 1, 0, 1}, std::vector<double>{2, 2, 2, 2});
  const TwoArmStudy prior{StudyArm({0, 1}, {0, 1}, std::vector<double>{1, 1}), ctrl, "p"};
  const TwoArmStudy cur{StudyArm({0.5, 1.5, 2.5}, {0.2, 0.4, 0.9}), StudyArm({0.1, 2.9}, {0.3, 0.7}), "c"};
  const auto paired = validate_paired(prior, cur);
  const Bandwidths bw{2, 2, 3, 3, 3};
  const auto comp = compute_components(cur, fit_mu0_surface(paired, bw, kEpan), bw, kEpan);
  EXPECT_NEAR(delta_h_pooled(comp).estimate, 0.0, 1e-14);
  EXPECT_NEAR(delta_h_aug(comp).estimate, 0.0, 1e-14);
  EXPECT_NEAR(delta_h_pooled(comp).se, 0.0, 1e-14);
  EXPECT_NEAR(delta_h_aug(comp).se, 0.0, 1e-14);
}

TEST(Estimators, GoldAndRatio) {
  const TwoArmStudy cur{StudyArm({0, 0, 0}, {0, 0, 0}, std::vector<double>{1, 2, 3}),
                        StudyArm({0, 0, 0}, {0, 0, 0}, std::vector<double>{0, 1, 2}), "g"};
  const auto g = delta_gold(cur);
  EXPECT_DOUBLE_EQ(g.estimate, 1.0);
  EXPECT_NEAR(g.se, std::sqrt(1.0 / 3 + 1.0 / 3), 1e-15);
  EXPECT_DOUBLE_EQ(pte_ratio(g, g), 1.0);
  EstimateWithSE zero;
  EXPECT_EQ(pte_ratio(zero, g), 0.0);
  EXPECT_THROW(pte_ratio(g, zero), Error);
  const TwoArmStudy blind{cur.treated.blinded(), cur.control, "b"};
  EXPECT_THROW(delta_gold(blind), Error);
}

TEST(Estimators, TransformAggregatesOutOfSupport) {
  const StudyArm ctrl({0, 1}, {0, 1}, std::vector<double>{1, 2});
  const Mu0Surface surf(ctrl, 0.5, 0.5, kEpan);
  const StudyArm arm({0, 50, 60, 1}, {0, 50, 60, 1});
  try {
    transform_arm(surf, arm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfSupport);
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos) << e.what();
  }
  const Mu0Surface clamp(ctrl, 0.5, 0.5, {KernelKind::Epanechnikov, 1e-10, OobPolicy::ClampToNearest});
  const auto t = transform_arm(clamp, arm);
  EXPECT_EQ(t.clamped, 2u);
  EXPECT_EQ(t.values.size(), 4u);
}

TEST(Estimators, SurfaceRecoversGeneratingMean) {
  // Setting 5 has unit noise and mu0(s, w) = 3.2 + 4 s everywhere. A single
  // point only sees a handful of neighbours, so check the average error.
  const auto prior = generate_setting(SettingId(5), StudySide::Prior, {1000, 800}, 1, kFixedPriorReplication);
  const auto cur = generate_setting(SettingId(5), StudySide::Current, {300, 300}, 1, 0);
  const auto paired = validate_paired(prior, cur);
  const auto bw = default_bandwidths(paired, KernelKind::Epanechnikov);
  const SmoothingConfig clamp{KernelKind::Epanechnikov, 1e-10, OobPolicy::ClampToNearest};
  const auto surf = fit_mu0_surface(paired, bw, clamp);
  double err = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < cur.control.size(); ++i) {
    const double s = cur.control.s()[i];
    if (s > 12.0) continue;
    err += surf(s, cur.control.w()[i]) - (3.2 + 4 * s);
    ++used;
  }
  ASSERT_GT(used, 200u);
  EXPECT_NEAR(err / used, 0.0, 0.25);
}

TEST(Estimators, DuplicatedPointsMapPointwise) {
  const Fixture f;
  const auto paired = f.paired();
  const auto surf = fit_mu0_surface(paired, f.bw, kEpan);
  const StudyArm one({0.5}, {0.3});
  const StudyArm three({0.5, 0.5, 0.5}, {0.3, 0.3, 0.3});
  const auto a = transform_arm(surf, one).values;
  const auto b = transform_arm(surf, three).values;
  for (double v : b) EXPECT_EQ(v, a[0]);
}
