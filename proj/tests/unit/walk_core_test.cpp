#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <nlohmann/json.hpp>

#include "lwb/error.hpp"
#include "lwb/walk/alias_table.hpp"
#include "lwb/walk/presets.hpp"
#include "lwb/walk/walker.hpp"

using namespace lwb::walk;

TEST(Lattice, NormAndDiskMembershipIsStrict) {
  EXPECT_EQ(norm({0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(norm({3, 4}), 5.0);
  const Disk d{{0, 0}, 5.0};
  EXPECT_TRUE(d.contains({4, 2}));
  EXPECT_FALSE(d.contains({3, 4}));
  EXPECT_FALSE(d.contains({5, 0}));
  const Disk unit{{0, 0}, 1.0};
  ASSERT_EQ(disk_points(unit).size(), 1u);
}

TEST(Lattice, BandDistanceMatchesBruteForce) {
  const Disk d{{2, -1}, 6.5};
  const auto inside = disk_points(d);
  for (std::int64_t x = -12; x <= 16; ++x) {
    for (std::int64_t y = -15; y <= 13; ++y) {
      const Point p{x, y};
      double best = d.contains(p) ? 0.0 : 1e300;
      if (!d.contains(p))
        for (auto z : inside) best = std::min(best, norm(p - z));
      ASSERT_NEAR(distance_to_disk(p, d), best, 1e-12) << x << "," << y;
      for (double s : {1.0, 2.5, 4.0}) ASSERT_EQ(in_band(p, d, s), !d.contains(p) && norm(p - d.center) - d.radius <= s);
    }
  }
}

TEST(JumpLaw, IdACovarianceAndAperiodicity) {
  const auto law = id_a();
  EXPECT_NEAR(law.total_mass(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(law.covariance().xx, 1.0);
  EXPECT_DOUBLE_EQ(law.covariance().yy, 1.0);
  EXPECT_DOUBLE_EQ(law.covariance().xy, 0.0);
  EXPECT_TRUE(law.identity_covariance(1e-12));
  EXPECT_TRUE(law.finite_range());
  EXPECT_DOUBLE_EQ(law.range(), 2.0);
  // Diagonal neighbours need two steps.
  EXPECT_EQ(law.aperiodicity_n0(), 2);
  EXPECT_TRUE(std::isinf(law.moment_exponent_budget()));
}

TEST(JumpLaw, SrwFlagsCovarianceAndPeriod) {
  const auto law = srw();
  EXPECT_DOUBLE_EQ(law.covariance().xx, 0.5);
  EXPECT_FALSE(law.identity_covariance(1e-9));
  EXPECT_EQ(law.aperiodicity_n0(), -1);
  std::vector<JumpEntry> raw = law.core();
  auto loose = validate_law(raw);
  ASSERT_TRUE(loose.law.has_value());
  EXPECT_FALSE(loose.diagnostics.identity_covariance);
  EXPECT_FALSE(loose.diagnostics.strongly_aperiodic);
  ValidateOptions strict;
  strict.require_identity_covariance = true;
  auto r = validate_law(raw, strict);
  EXPECT_FALSE(r.law.has_value());
  ASSERT_EQ(r.diagnostics.errors.size(), 1u);
  EXPECT_EQ(r.diagnostics.errors[0], "CovarianceMismatch");
}

TEST(JumpLaw, RejectsAsymmetricUnnormalizedAndZeroEntries) {
  auto asym = validate_law({{{1, 0}, 0.3}, {{-1, 0}, 0.2}, {{0, 1}, 0.25}, {{0, -1}, 0.25}});
  EXPECT_FALSE(asym.law);
  EXPECT_EQ(asym.diagnostics.errors.front(), "NotSymmetric");
  auto unnorm = validate_law({{{1, 0}, 0.3}, {{-1, 0}, 0.3}});
  EXPECT_EQ(unnorm.diagnostics.errors.front(), "NotNormalized");
  auto zero = validate_law({{{1, 0}, 0.5}, {{-1, 0}, 0.5}, {{0, 1}, 0.0}});
  EXPECT_EQ(zero.diagnostics.errors.front(), "ZeroProbabilityEntry");
  try {
    make_law({{{1, 0}, 0.3}, {{-1, 0}, 0.2}, {{0, 0}, 0.5}});
    FAIL();
  } catch (const lwb::Error& e) {
    EXPECT_EQ(e.code(), lwb::ErrorCode::NotSymmetric);
  }
}

TEST(JumpLaw, HeavyPresetHasUnitCovarianceAndFiniteTailMass) {
  const auto law = heavy(0.25);
  EXPECT_NEAR(law.total_mass(), 1.0, 1e-12);
  EXPECT_TRUE(law.identity_covariance(1e-9));
  EXPECT_FALSE(law.finite_range());
  EXPECT_EQ(law.aperiodicity_n0(), 1);
  EXPECT_DOUBLE_EQ(law.moment_exponent_budget(), 4.0);
  EXPECT_GT(law.hold_prob(), 0.0);
  EXPECT_EQ(law.prob({3, 4}), law.prob({-3, -4}));
  EXPECT_GT(law.prob({100, 0}), 0.0);
  EXPECT_EQ(law.prob({10001, 0}), 0.0);
  EXPECT_THROW(heavy(0.5), lwb::Error);
}

TEST(JumpLaw, ConditionAScanReportsPositiveConstantForHeavyTail) {
  const auto rep = condition_a_scan(heavy(0.25), 0.25, {6, 10}, {4, 8});
  EXPECT_FALSE(rep.finite_range);
  ASSERT_EQ(rep.scans.size(), 4u);
  EXPECT_GT(rep.min_constant, 0.0);
  for (const auto& s : rep.scans) EXPECT_GT(s.inf_sum, 0.0);
}

TEST(JumpLaw, JsonRoundTripAndPresetSelection) {
  const auto law = id_a();
  const auto back = law_from_json(law_to_json(law));
  EXPECT_EQ(back.core().size(), law.core().size());
  EXPECT_DOUBLE_EQ(back.prob({2, 0}), 0.1);
  const auto pre = law_from_json(nlohmann::json::parse(R"([{"preset":"lazy-srw"}])"));
  EXPECT_EQ(pre.preset(), "lazy-srw");
  EXPECT_THROW(preset("nope"), lwb::Error);
}

TEST(Sampler, DegenerateLawAlwaysStays) {
  const auto law = make_law({{{0, 0}, 1.0}});
  StepSampler s(law);
  Stream rng(1, 0);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(s.sample(rng), (Point{0, 0}));
}

TEST(Sampler, IdAHoldFrequencyAndVarianceWithinFourSigma) {
  const auto law = id_a();
  StepSampler s(law);
  Stream rng(2024, 0, "sampler");
  const int n = 10'000'000;
  long hold = 0;
  double sx2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto d = s.sample(rng);
    if (d.x == 0 && d.y == 0) ++hold;
    sx2 += static_cast<double>(d.x * d.x);
  }
  const double f = static_cast<double>(hold) / n;
  EXPECT_NEAR(f, 0.2, 4.0 * std::sqrt(0.2 * 0.8 / n));
  // Var(X^2) for the x-coordinate: E x^4 - 1 = 2*0.1*(1+16) - 1 = 2.4.
  EXPECT_NEAR(sx2 / n, 1.0, 4.0 * std::sqrt(2.4 / n));
}

TEST(Sampler, ChiSquareGoodnessOfFit) {
  for (const auto& law : {id_a(), lazy_srw()}) {
    StepSampler s(law);
    Stream rng(7, 1, "chi2");
    std::map<std::pair<std::int64_t, std::int64_t>, long> counts;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
      const auto d = s.sample(rng);
      ++counts[{d.x, d.y}];
    }
    double chi2 = 0.0;
    for (const auto& e : law.core()) {
      const double expect = e.p * n;
      const double obs = static_cast<double>(counts[{e.offset.x, e.offset.y}]);
      chi2 += (obs - expect) * (obs - expect) / expect;
    }
    EXPECT_EQ(counts.size(), law.core().size());
    boost::math::chi_squared dist(static_cast<double>(law.core().size() - 1));
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001);
  }
}

TEST(Sampler, HeavyTailRingFrequencies) {
  const auto law = heavy(0.25);
  StepSampler s(law);
  Stream rng(11, 0, "tail");
  const int n = 2'000'000;
  long far = 0;
  for (int i = 0; i < n; ++i)
    if (norm2(s.sample(rng)) > 9) ++far;
  double p_far = 0.0;
  for (const auto& e : law.support_within(200))
    if (norm2(e.offset) > 9) p_far += e.p;
  p_far += law.tail()->mass() - [&] {
    double m = 0.0;
    for (const auto& e : law.support_within(200)) m += law.tail()->prob(e.offset);
    return m;
  }();
  EXPECT_NEAR(static_cast<double>(far) / n, p_far, 4.0 * std::sqrt(p_far / n));
}

TEST(Walker, RadiusOneExitIsGeometric) {
  const auto law = id_a();
  StepSampler s(law);
  const Disk d{{0, 0}, 1.0};
  const int reps = 200000;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) {
    Stream rng(5, static_cast<std::uint64_t>(i));
    RunOptions o;
    o.record_local_time = true;
    const auto r = run_until_exit({0, 0}, d, s, rng, o);
    ASSERT_FALSE(d.contains(r.exit_point));
    ASSERT_EQ(r.local_time->total_visits(), r.exit_time + 1);
    sum += static_cast<double>(r.exit_time);
  }
  // Var of geometric(0.8) on {1,2,..} is 0.2/0.64.
  EXPECT_NEAR(sum / reps, 1.25, 4.0 * std::sqrt(0.3125 / reps));
}

TEST(Walker, StartOutsideReturnsImmediately) {
  StepSampler s(id_a());
  Stream rng(1, 0);
  const auto r = run_until_exit({10, 0}, {{0, 0}, 5.0}, s, rng);
  EXPECT_EQ(r.exit_time, 0u);
  EXPECT_EQ(r.exit_point, (Point{10, 0}));
}

TEST(Walker, MaxStepsExceededIsAnError) {
  StepSampler s(make_law({{{0, 0}, 1.0}}));
  Stream rng(1, 0);
  RunOptions o;
  o.max_steps = 1000;
  try {
    run_until_exit({0, 0}, {{0, 0}, 5.0}, s, rng, o);
    FAIL();
  } catch (const lwb::Error& e) {
    EXPECT_EQ(e.code(), lwb::ErrorCode::MaxStepsExceeded);
  }
}

TEST(Walker, PathsStayInsideUntilExitAndReplayBitIdentically) {
  StepSampler s(id_a());
  const Disk d{{0, 0}, 30.0};
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    Stream a(99, rep), b(99, rep);
    RunOptions o;
    o.record_local_time = true;
    const auto ra = run_until_exit({3, -2}, d, s, a, o);
    const auto rb = run_until_exit({3, -2}, d, s, b, o);
    EXPECT_EQ(ra.exit_time, rb.exit_time);
    EXPECT_EQ(ra.exit_point, rb.exit_point);
    EXPECT_EQ(ra.local_time->counts(), rb.local_time->counts());
    std::uint64_t inside_visits = 0;
    for (const auto& [p, c] : ra.local_time->counts())
      if (d.contains(p)) inside_visits += c;
    EXPECT_EQ(inside_visits, ra.exit_time);
    EXPECT_EQ(ra.local_time->at(ra.local_time->argmax()), ra.local_time->max());
  }
}

TEST(Walker, MeanExitTimeScalesQuadratically) {
  StepSampler s(id_a());
  std::vector<double> ratio;
  for (double n : {25.0, 50.0, 100.0}) {
    double sum = 0.0;
    const int reps = 2000;
    for (int i = 0; i < reps; ++i) {
      Stream rng(17, static_cast<std::uint64_t>(i), "scale");
      sum += static_cast<double>(run_until_exit({0, 0}, {{0, 0}, n}, s, rng).exit_time);
    }
    ratio.push_back(sum / reps / (n * n));
  }
  for (double r : ratio) {
    EXPECT_GT(r, ratio[0] / 2.0);
    EXPECT_LT(r, ratio[0] * 2.0);
  }
}
