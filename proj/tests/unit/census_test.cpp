#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lwb/census/census.hpp"
#include "lwb/error.hpp"
#include "lwb/walk/presets.hpp"

using namespace lwb;
using namespace lwb::census;

TEST(Census, LevelsUseNaturalLogAndModeConstant) {
  const double l = std::log(1000.0);
  EXPECT_NEAR(census_level(Mode::ExitDisk, 1000, 0.5), l * l / std::numbers::pi, 1e-12);
  EXPECT_NEAR(census_level(Mode::FixedTime, 1000, 0.5), 0.5 * l * l / std::numbers::pi, 1e-12);
}

TEST(Census, VanishingThresholdCountsEveryVisitedSite) {
  const auto law = walk::id_a();
  const auto f = census_field(law, Mode::FixedTime, 5000, 3, 0);
  EXPECT_EQ(census_counts(f, Mode::FixedTime, 5000, {1e-9})[0], f.distinct_sites());
  const auto g = census_field(law, Mode::ExitDisk, 60, 3, 0);
  std::uint64_t inside = 0;
  for (const auto& [x, c] : g.counts()) inside += walk::norm2(x) < 3600;
  EXPECT_EQ(census_counts(g, Mode::ExitDisk, 60, {1e-9})[0], inside);
  EXPECT_EQ(inside + 1, g.distinct_sites());  // the exit point
}

TEST(Census, DegenerateWalk) {
  const auto f = census_field(walk::id_a(), Mode::FixedTime, 0, 1, 0);
  EXPECT_EQ(f.max(), 1u);
  EXPECT_EQ(census_counts(f, Mode::FixedTime, 0, {0.5})[0], 0u);
  CensusConfig c;
  c.mode = Mode::FixedTime;
  c.n = 0;
  const auto r = run_census(walk::id_a(), c);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].l_star, 1u);
  EXPECT_EQ(r[0].count, 0u);
}

TEST(Census, CountsMonotoneInThresholdAndConsistent) {
  CensusConfig c;
  c.n = 300;
  c.thresholds = {0.1, 0.3, 0.5, 0.8, 1.2, 1.9};
  c.replicas = 10;
  c.seed = 5;
  const auto res = run_census(walk::id_a(), c);
  ASSERT_EQ(res.size(), 60u);
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& r = res[i];
    EXPECT_LE(r.count, r.distinct_sites);
    if (r.count >= 1) EXPECT_GE(r.l_star, census_level(Mode::ExitDisk, 300, r.threshold));
    if (i % 6 != 0) EXPECT_LE(r.count, res[i - 1].count);
    EXPECT_EQ(r.replica, i / 6);
    EXPECT_EQ(r.seed, 5u);
  }
}

TEST(Census, ThresholdRangeChecked) {
  CensusConfig c;
  c.thresholds = {2.0};
  EXPECT_THROW(run_census(walk::id_a(), c), Error);
  c.mode = Mode::FixedTime;
  c.thresholds = {1.0};
  EXPECT_THROW(run_census(walk::id_a(), c), Error);
}

TEST(Census, DeterministicAndThreadInvariant) {
  CensusConfig c;
  c.n = 200;
  c.thresholds = {0.4, 0.9};
  c.replicas = 12;
  c.seed = 77;
  const auto a = run_census(walk::id_a(), c);
  c.threads = 3;
  const auto b = run_census(walk::id_a(), c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].count, b[i].count);
    EXPECT_EQ(a[i].l_star, b[i].l_star);
    EXPECT_EQ(a[i].top_site, b[i].top_site);
    EXPECT_EQ(a[i].steps, b[i].steps);
  }
}

TEST(Census, EquivalenceOnOnePath) {
  const auto e = census_equivalence(walk::id_a(), 2000, 0.5, 3);
  // same local-time level on the same field
  EXPECT_EQ(e.theta_matched, e.psi);
  ASSERT_GT(e.psi, 0u);
  const double r = static_cast<double>(e.theta_half) / static_cast<double>(e.psi);
  EXPECT_LT(r, 3.0);
  EXPECT_GT(r, 1.0 / 3.0);
}

TEST(Census, ExponentFitNanWhenCountVanishes) {
  const auto fits = psi_exponent(walk::id_a(), {10, 20}, {1.9}, 3, 1);
  EXPECT_TRUE(std::isnan(fits[0].slope));
  EXPECT_THROW(psi_exponent(walk::id_a(), {10}, {0.5}, 3, 1), Error);
}

TEST(Census, ExponentFitIsLeastSquares) {
  const auto fits = psi_exponent(walk::id_a(), {40, 80, 160}, {0.05}, 4, 2);
  const auto& f = fits[0];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double x = std::log(f.radii[i]), y = std::log(f.mean_counts[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  EXPECT_NEAR(f.slope, (3 * sxy - sx * sy) / (3 * sxx - sx * sx), 1e-12);
  EXPECT_GT(f.slope, 0.0);
}

TEST(RatioSeries, MaximumNeverDecreasesAlongAPath) {
  const auto s = et_ratio_series(walk::lazy_srw(), {100, 1000, 10000}, 8, 4);
  for (const auto& r : s.ratios)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_GT(r[j], 0.0);
      EXPECT_TRUE(std::isfinite(r[j]));
      if (j > 0) {
        const double l0 = std::log(double(s.checkpoints[j - 1])), l1 = std::log(double(s.checkpoints[j]));
        EXPECT_GE(r[j] * l1 * l1 + 1e-9, r[j - 1] * l0 * l0);
      }
    }
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_LE(s.q1[j], s.median[j]);
    EXPECT_LE(s.median[j], s.q3[j]);
  }
  EXPECT_THROW(et_ratio_series(walk::lazy_srw(), {100, 100}, 2, 1), Error);
  EXPECT_THROW(et_ratio_series(walk::lazy_srw(), {1}, 2, 1), Error);
}

TEST(TimeExponent, RisesWithRadius) {
  const auto te = time_exponent(walk::id_a(), {50, 500}, 200, 13);
  EXPECT_LT(te[0].median, te[1].median);
  EXPECT_THROW(time_exponent(walk::id_a(), {5}, 2, 1), Error);
}

TEST(TimeExponent, StayPutLawNeverExits) {
  try {
    time_exponent(walk::make_law({{{0, 0}, 1.0}}), {10}, 1, 1, 1, 10000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaxStepsExceeded);
  }
}

TEST(Quantiles, Interpolated) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(quantile({0, 10}, 0.25), 2.5);
  EXPECT_THROW(median({}), Error);
}
