#include <gtest/gtest.h>

#include "lwb/error.hpp"
#include "lwb/harnack/harnack.hpp"
#include "lwb/walk/presets.hpp"

using namespace lwb;
using namespace lwb::harnack;

TEST(Harnack, SingleSourceGivesUnitRatio) {
  const auto rep = interior_harnack_ratio(walk::lazy_srw(), 5, 30, 2, {16, 1});
  ASSERT_EQ(rep.sources.size(), 1u);
  EXPECT_EQ(rep.max_ratio, 1.0);
  EXPECT_EQ(rep.min_ratio, 1.0);
}

TEST(Harnack, InteriorSampleGridAndPositivity) {
  const auto rep = interior_harnack_ratio(walk::id_a(), 6, 40, 2);
  EXPECT_EQ(rep.sources.size(), 8u);
  EXPECT_EQ(rep.targets.size(), 16u);
  for (const auto& x : rep.sources) EXPECT_LT(walk::norm(x), 6.0);
  for (const auto& y : rep.targets) EXPECT_TRUE(walk::in_band(y, {{0, 0}, 40.0}, 2.0));
  for (const auto& row : rep.h)
    for (double v : row) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  EXPECT_GE(rep.max_ratio, 1.0);
  EXPECT_LE(rep.min_ratio, 1.0);
  EXPECT_DOUBLE_EQ(rep.max_ratio * rep.min_ratio, 1.0);
}

TEST(Harnack, InteriorRatioTightensWithSeparation) {
  for (const char* name : {"lazy-srw", "id-a"}) {
    const auto law = walk::preset(name);
    const auto near = interior_harnack_ratio(law, 20, 100, 2);
    const auto far = interior_harnack_ratio(law, 5, 100, 2);
    EXPECT_LT(far.max_ratio, near.max_ratio) << name;
  }
}

TEST(Harnack, HeavyTailInteriorUsesFullSupport) {
  const auto law = walk::heavy(0.25);
  const auto near = interior_harnack_ratio(law, 6, 24, 3, {8, 4});
  const auto far = interior_harnack_ratio(law, 2, 24, 3, {8, 4});
  EXPECT_LT(far.max_ratio, near.max_ratio);
}

TEST(Harnack, ExteriorRatioTightensWithSeparation) {
  const auto law = walk::lazy_srw();
  const auto near = exterior_harnack_ratio(law, 4, 16, 2, 32);
  const auto far = exterior_harnack_ratio(law, 4, 48, 2, 96);
  EXPECT_LT(far.max_ratio, near.max_ratio);
  for (const auto& x : far.sources) EXPECT_TRUE(walk::in_band(x, {{0, 0}, 48.0}, 2.0));
  for (const auto& y : far.targets) {
    EXPECT_TRUE(walk::in_band(y, {{0, 0}, 4.0}, 2.0));
    EXPECT_LT(walk::norm(y), 6.0);
  }
}

TEST(Harnack, ConditionedVariantTightensAndNormalizes) {
  const auto law = walk::lazy_srw();
  const auto near = exterior_harnack_ratio(law, 4, 16, 2, 32, ExteriorMode::Conditioned);
  const auto far = exterior_harnack_ratio(law, 4, 48, 2, 96, ExteriorMode::Conditioned);
  EXPECT_TRUE(far.conditioned);
  EXPECT_LT(far.max_ratio, near.max_ratio);
  // Conditioned values exceed the killed ones.
  const auto killed = exterior_harnack_ratio(law, 4, 16, 2, 32, ExteriorMode::Killed);
  for (std::size_t i = 0; i < near.h.size(); ++i)
    for (std::size_t k = 0; k < near.h[i].size(); ++k) EXPECT_GT(near.h[i][k], killed.h[i][k]);
}

TEST(Harnack, UnconditionedReportsTruncationGap) {
  const auto law = walk::lazy_srw();
  const auto rep = exterior_harnack_ratio(law, 4, 12, 2, 40, ExteriorMode::Unconditioned, {}, 1.0);
  EXPECT_GT(rep.gap, 0.0);
  EXPECT_DOUBLE_EQ(rep.truncation_radius, 80.0);
  try {
    exterior_harnack_ratio(law, 4, 12, 2, 40, ExteriorMode::Unconditioned, {}, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncationBudgetExceeded);
  }
}

TEST(Harnack, GeometryValidated) {
  EXPECT_THROW(interior_harnack_ratio(walk::id_a(), 10, 5, 2), Error);
  EXPECT_THROW(exterior_harnack_ratio(walk::id_a(), 5, 6, 2, 50), Error);
  EXPECT_THROW(exterior_harnack_ratio(walk::id_a(), 5, 20, 2, 21), Error);
}

TEST(Harnack, ReportsAreDeterministic) {
  const auto a = interior_harnack_ratio(walk::id_a(), 5, 30, 2);
  const auto b = interior_harnack_ratio(walk::id_a(), 5, 30, 2);
  EXPECT_EQ(a.h, b.h);
  EXPECT_EQ(a.targets, b.targets);
}
