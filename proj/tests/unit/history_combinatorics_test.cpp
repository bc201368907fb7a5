#include <gtest/gtest.h>

#include <cmath>

#include "lwb/error.hpp"
#include "lwb/excursion/excursion.hpp"
#include "lwb/history/history.hpp"
#include "lwb/walk/presets.hpp"

using namespace lwb;
using namespace lwb::history;

namespace {

double log_term(std::uint64_t m, std::uint64_t l) {
  return std::lgamma(double(m + l) + 1) - std::lgamma(double(m) + 1) - std::lgamma(double(l) + 1) -
         double(m + l + 1) * std::log(2.0);
}

}  // namespace

TEST(Histories, SmallExamples) {
  const auto one = enumerate_histories(history_spec(2, {1}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (std::vector<int>{1, 2, 1, 0}));
  EXPECT_EQ(count_histories(history_spec(3, {2, 1})), 2);
  EXPECT_EQ(count_histories(history_spec(4, {1, 2, 1})), 2);
  EXPECT_EQ(enumerate_histories(history_spec(4, {1, 2, 1})).size(), 2u);
}

TEST(Histories, CountMatchesEnumerationExhaustively) {
  const auto specs = all_specs(13);
  // compositions of s <= 6: sum_s 2^(s-1)
  EXPECT_EQ(specs.size(), 63u);
  for (const auto& s : specs) {
    const auto paths = enumerate_histories(s);
    EXPECT_EQ(count_histories(s), paths.size());
    for (const auto& p : paths) {
      ASSERT_EQ(p.size(), s.length() + 1);
      EXPECT_EQ(p.front(), 1);
      EXPECT_EQ(p.back(), 0);
      for (std::size_t t = 0; t + 1 < p.size(); ++t) {
        EXPECT_GT(p[t], 0);
        EXPECT_EQ(std::abs(p[t + 1] - p[t]), 1);
        EXPECT_LE(p[t], s.n);
      }
    }
  }
}

TEST(Histories, Errors) {
  EXPECT_THROW(history_spec(1, {}), Error);
  EXPECT_THROW(history_spec(3, {1}), Error);
  EXPECT_THROW(history_spec(3, {1, 0}), Error);
  EXPECT_THROW(enumerate_histories(history_spec(3, {5, 5})), Error);
}

TEST(Histories, BinomialSymmetryAndValues) {
  EXPECT_EQ(binomial(10, 3), 120);
  EXPECT_EQ(binomial(3, 5), 0);
  for (std::uint64_t n = 0; n < 40; ++n)
    for (std::uint64_t k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), binomial(n, n - k));
  EXPECT_EQ(binomial(100, 50), BigInt("100891344545564193334812497256"));
}

TEST(RateFunction, VanishesToSecondOrderAtOne) {
  EXPECT_NEAR(rate_function(1.0), 0.0, 1e-15);
  const double h = 1e-4;
  EXPECT_NEAR((rate_function(1 + h) - rate_function(1 - h)) / (2 * h), 0.0, 1e-8);
  EXPECT_NEAR((rate_function(1 + h) - 2 * rate_function(1.0) + rate_function(1 - h)) / (h * h), 0.5, 1e-5);
  EXPECT_GT(rate_function(1.3), 0.0);
  EXPECT_GT(rate_function(0.7), 0.0);
}

TEST(Windows, LiteralThreshold) {
  EXPECT_EQ(windows(0.5).k0, 4);
  EXPECT_EQ(windows(1.0).k0, 4);
  EXPECT_EQ(windows(0.1).k0, 5);
  const auto w = windows(0.5);
  EXPECT_EQ(w.lo(3), 1u);
  EXPECT_EQ(w.hi(3), 1u);
  // N_k is not an integer, so the closed window holds 2k integers
  EXPECT_EQ(w.hi(10) - w.lo(10) + 1, 20u);
  EXPECT_THROW(windows(2.0), Error);
}

TEST(Stirling, BandMatchesLgammaOracle) {
  for (double a : {0.5, 1.0})
    for (int k : {10, 57, 200}) {
      const Windows w{a, 0};
      const auto m = static_cast<std::uint64_t>(std::llround(w.target(k + 1)));
      const auto l = static_cast<std::uint64_t>(std::llround(w.target(k))) - 1;
      const auto b = stirling_band(k, a, m, l);
      EXPECT_NEAR(std::log(b.value), log_term(m, l), 1e-14 * std::lgamma(double(m + l) + 1));
      EXPECT_LE(b.value_lower, b.value);
      EXPECT_GE(b.value_upper, b.value);
      EXPECT_LT((b.value_upper - b.value_lower) / b.value, 1e-14);
      EXPECT_NEAR(b.reference, std::pow(k, -3 * a - 1) / std::sqrt(std::log(k)), 1e-12 * b.reference);
    }
  EXPECT_THROW(stirling_band(10, 0.5, 10, 10), Error);
  EXPECT_THROW(stirling_band(1, 0.5, 1, 1), Error);
}

TEST(Stirling, SweepMatchesIndependentScan) {
  const double a = 0.5;
  const Windows w{a, 0};
  double lo = 1e300, hi = 0;
  std::uint64_t pts = 0;
  for (int k = 10; k <= 20; ++k) {
    const double ref = std::pow(k, -3 * a - 1) / std::sqrt(std::log(k));
    for (auto m = std::uint64_t(std::ceil(w.target(k + 1) - k - 1)); double(m) <= w.target(k + 1) + k + 1; ++m)
      for (auto l = std::uint64_t(std::ceil(w.target(k) - k - 1)); double(l) <= w.target(k) + k - 1; ++l) {
        const double r = std::exp(log_term(m, l)) / ref;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ++pts;
      }
  }
  const auto s = stirling_sweep(a, 10, 20);
  EXPECT_EQ(s.points, pts);
  EXPECT_NEAR(s.min_ratio / lo, 1.0, 1e-9);
  EXPECT_NEAR(s.max_ratio / hi, 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(s.C, std::max(s.max_ratio, 1 / s.min_ratio));
  EXPECT_DOUBLE_EQ(s.spread, s.max_ratio / s.min_ratio);
}

TEST(LadderSum, DynamicProgramMatchesBruteForce) {
  for (int k0 : {0, 2})
    for (double a : {0.5, 1.0})
      for (int n = 2; n <= 4; ++n) {
        LadderSumOptions o;
        o.k0 = k0;
        const auto dp = ladder_sum(a, n, o);
        const auto exact = ladder_sum_brute(a, n, o);
        EXPECT_LE(dp.lower, exact) << a << " " << n;
        EXPECT_GE(dp.upper, exact) << a << " " << n;
        EXPECT_LT(dp.relative_width, 1e-50);
      }
}

TEST(LadderSum, LiteralWindowsAtThreeIsOneQuarter) {
  // m_2 = m_3 = 1: a single factor C(1,0)/4
  const auto r = ladder_sum(0.5, 3);
  EXPECT_LE(r.lower, BigRational(1, 4));
  EXPECT_GE(r.upper, BigRational(1, 4));
  EXPECT_NEAR(r.log_value, std::log(0.25), 1e-15);
  EXPECT_EQ(ladder_sum_brute(0.5, 3), BigRational(1, 4));
}

TEST(LadderSum, DecreasesInN) {
  double prev = 1.0;
  for (int n = 3; n <= 20; ++n) {
    const double v = ladder_sum(0.5, n).log_value;
    EXPECT_LT(v, prev) << n;
    prev = v;
  }
}

TEST(LadderSum, FactorsMultiplyToValue) {
  const auto r = ladder_sum(1.0, 12);
  double s = 0;
  for (double f : r.log_factors) s += f;
  EXPECT_NEAR(s, r.log_value, 1e-9 * std::abs(r.log_value));
}

TEST(LadderSum, ExponentDefectShrinks) {
  // the defect is carried by n c^n prod log l, so delta1 log(n!)/n settles
  double prev = 1e9;
  std::vector<double> scaled;
  for (int n : {10, 20, 40, 60}) {
    const auto r = ladder_sum(0.5, n);
    EXPECT_LT(r.delta1, prev);
    EXPECT_GT(r.delta1, 0.0);
    prev = r.delta1;
    scaled.push_back(r.delta1 * std::lgamma(n + 1.0) / n);
  }
  EXPECT_LT(std::abs(scaled[3] - scaled[2]), std::abs(scaled[1] - scaled[0]));
  EXPECT_THROW(ladder_sum(0.5, 61), Error);
}

TEST(SuccessBand, OrderedAndScalesLikeInverseLog) {
  const auto b10 = success_probability_band(0.5, 10, 0.5, 2.0);
  const auto b20 = success_probability_band(0.5, 20, 0.5, 2.0);
  EXPECT_LE(b10.lower, b10.upper);
  EXPECT_NEAR(b10.lower * std::log(10.0) / std::exp(b10.log_sum), 0.5, 1e-12);
  EXPECT_NEAR(b20.upper * std::log(20.0) / std::exp(b20.log_sum), 2.0, 1e-12);
  EXPECT_THROW(success_probability_band(0.5, 10, 2.0, 1.0), Error);
}

TEST(SuccessBand, DeskLadderFrequencyInsideBand) {
  const auto law = walk::id_a();
  const auto L = excursion::geometric_ladder(81, 3, 3, 2);
  const auto cm = excursion::crossing_probability_matrix(law, L, {0});
  TopFactors t;
  t.enter_lo = cm[0].up_min;
  t.enter_hi = cm[0].up_max;
  t.escape_lo = 1 - cm[0].up_max - cm[0].skip_max;
  t.escape_hi = 1 - cm[0].up_min;
  const auto band = success_probability_band(0.5, 3, t);
  ASSERT_LE(band.lower, band.upper);
  const auto s = excursion::simulate_excursions(law, L, excursion::band_start(L), 20000, 11,
                                                excursion::success_predicate(0.5, 3));
  EXPECT_GE(s.success_rate, band.lower / 5);
  EXPECT_LE(s.success_rate, band.upper * 5);
}

TEST(PaleyZygmund, ConstantVariable) {
  const auto pz = paley_zygmund_bound(std::vector<double>(100, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(pz.bound, 0.25);
  EXPECT_DOUBLE_EQ(pz.empirical, 1.0);
  EXPECT_TRUE(pz.consistent);
}

TEST(PaleyZygmund, Bernoulli) {
  for (double p : {0.1, 0.5, 0.9}) {
    const auto pz = paley_zygmund_bound(p, p, 0.3);
    EXPECT_NEAR(pz.bound, 0.49 * p, 1e-15);
    EXPECT_LT(pz.bound, p);
  }
  std::vector<double> w(1000, 0.0);
  for (int i = 0; i < 300; ++i) w[static_cast<std::size_t>(i)] = 1.0;
  const auto pz = paley_zygmund_bound(w, 0.3);
  EXPECT_NEAR(pz.empirical, 0.3, 1e-15);
  EXPECT_NEAR(pz.bound, 0.49 * 0.3, 1e-12);
  EXPECT_LE(pz.bound, 1.0);
}

TEST(PaleyZygmund, Errors) {
  EXPECT_THROW(paley_zygmund_bound(0.0, 1.0, 0.5), Error);
  EXPECT_THROW(paley_zygmund_bound(std::vector<double>(10, 0.0), 0.5), Error);
  EXPECT_THROW(paley_zygmund_bound(1.0, 1.0, 1.0), Error);
}
