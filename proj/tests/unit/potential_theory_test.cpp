#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lwb/error.hpp"
#include "lwb/potential/estimates.hpp"
#include "lwb/potential/green.hpp"
#include "lwb/potential/potential_kernel.hpp"
#include "lwb/potential/transition.hpp"
#include "lwb/walk/presets.hpp"
#include "lwb/walk/walker.hpp"

using namespace lwb;
using namespace lwb::potential;
using walk::Disk;
using walk::Point;

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

TEST(Transition, ZeroStepsIsPointMass) {
  const auto r = transition_probabilities(walk::id_a(), 0, 5);
  EXPECT_EQ(r.p.at({0, 0}), 1.0);
  EXPECT_EQ(r.p.sum(), 1.0);
}

TEST(Transition, TwoStepReturnIsSumOfSquares) {
  const auto law = walk::id_a();
  double sq = 0.0;
  for (const auto& e : law.core()) sq += e.p * e.p;
  EXPECT_NEAR(sq, 0.12, 1e-15);
  const auto r = transition_probabilities(law, 2, 8);
  EXPECT_NEAR(r.p.at({0, 0}), 0.12, 1e-15);
  EXPECT_NEAR(r.mass_loss, 0.0, 1e-15);
}

TEST(Transition, SmallBoxThrowsForFiniteRange) {
  EXPECT_THROW(
      {
        try {
          transition_probabilities(walk::id_a(), 10, 5);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::BoxTooSmall);
          throw;
        }
      },
      Error);
}

TEST(Transition, MatchesMonteCarloFrequencies) {
  const auto law = walk::lazy_srw();
  const auto r = transition_probabilities(law, 6, 8);
  walk::StepSampler sampler(law);
  walk::Stream rng(17, 0, "transition");
  const int trials = 400000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    Point x{0, 0};
    for (int k = 0; k < 6; ++k) x = x + sampler.sample(rng);
    if (x == Point{1, 1}) ++hits;
  }
  const double p = r.p.at({1, 1});
  EXPECT_NEAR(hits / double(trials), p, 4.0 * std::sqrt(p * (1 - p) / trials));
}

TEST(Gaussian, DefinitionAndSymmetry) {
  EXPECT_NEAR(gaussian_kernel(1, {0, 0}), 1.0 / (2.0 * std::numbers::pi), 1e-16);
  EXPECT_NEAR(gaussian_kernel(1, {0, 0}), 0.1591549, 1e-7);
  EXPECT_EQ(gaussian_kernel(0, {0, 0}), 1.0);
  EXPECT_EQ(gaussian_kernel(0, {1, 0}), 0.0);
  for (int n : {1, 5, 40})
    for (Point x : {Point{3, -2}, Point{0, 7}}) {
      EXPECT_EQ(gaussian_kernel(n, x), gaussian_kernel(n, {-x.x, -x.y}));
      EXPECT_DOUBLE_EQ(gaussian_kernel(n, x), gaussian_kernel(n, x, {1.0, 0.0, 1.0}));
    }
}

TEST(Gaussian, RiemannSumNearOneAtTwentyFive) {
  double s = 0.0;
  for (int y = -200; y <= 200; ++y)
    for (int x = -200; x <= 200; ++x) s += gaussian_kernel(25, {x, y});
  EXPECT_LT(std::abs(s - 1.0), 0.01);
}

TEST(Lclt, DecayExponentForAperiodicPresets) {
  for (const char* name : {"id-a", "lazy-srw"}) {
    const auto law = walk::preset(name);
    const auto box = static_cast<std::int64_t>(law.range() * 200) + 1;
    const auto fit = lclt_decay(law, 20, 200, 20, box);
    EXPECT_LE(fit.slope, -1.3) << name;
    for (const auto& p : fit.points) EXPECT_EQ(p.mass_loss, 0.0) << name;
  }
}

TEST(PotentialKernel, GaussianTailSumMatchesDirectSummation) {
  for (double c : {0.3, 2.0, 9.0})
    for (int N : {40, 300}) {
      // Direct sum to M plus the leading tail terms c/n^2 - c^2/(2n^3).
      const long M = 2000000;
      long double s = 0.0L;
      for (long n = M; n >= N; --n) s += (1.0L - std::exp(-c / (long double)n)) / n;
      const long double tail = c / (M + 0.5L) - c * c / (4.0L * (M + 0.5L) * (M + 0.5L));
      EXPECT_NEAR(gaussian_tail_sum(c, N), static_cast<double>(s + tail), 1e-11) << c << " " << N;
    }
  EXPECT_EQ(gaussian_tail_sum(0.0, 10), 0.0);
}

TEST(PotentialKernel, OriginSymmetryPositivityAndHarmonicity) {
  const auto law = walk::id_a();
  const auto m = potential_kernel(law, 64);
  EXPECT_EQ(m({0, 0}), 0.0);
  for (std::int64_t y = -64; y <= 64; ++y)
    for (std::int64_t x = -64; x <= 64; ++x) {
      ASSERT_EQ(m({x, y}), m({-x, -y}));
      if (x || y) ASSERT_GT(m({x, y}), 0.0);
    }
  EXPECT_LT(m.harmonicity_residual(law, 32), 1e-6);
  EXPECT_NEAR(m.origin_excess(law), 1.0, 1e-6);
  EXPECT_EQ(m.truncation.n_cut, 236);
  // Decomposition parts add up.
  for (Point x : {Point{5, 3}, Point{40, -7}})
    EXPECT_NEAR(m.i1 + m.i2.at(x) + m.i3.at(x), m(x), 1e-12);
}

TEST(PotentialKernel, LazySrwMatchesClosedFormSrwValues) {
  // Holding with probability h rescales a by 1/(1-h); for SRW a(1,0) = 1,
  // a(1,1) = 4/pi and a(2,0) = 4 - 8/pi.
  const auto law = walk::lazy_srw();
  const auto m = potential_kernel(law, 128);
  EXPECT_NEAR(m({1, 0}), 1.0 / 0.8, 1e-5);
  EXPECT_NEAR(m({0, -1}), 1.0 / 0.8, 1e-5);
  EXPECT_NEAR(m({1, 1}), 4.0 / std::numbers::pi / 0.8, 1e-5);
  EXPECT_NEAR(m({2, 0}), (4.0 - 8.0 / std::numbers::pi) / 0.8, 1e-5);
}

TEST(PotentialKernel, RejectsPeriodicLaw) {
  try {
    potential_kernel(walk::srw(), 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAperiodic);
  }
}

TEST(Green, RadiusOneIsGeometric) {
  const auto g = green_disk(walk::id_a(), {{0, 0}, 1.0});
  ASSERT_EQ(g.domain().size(), 1u);
  EXPECT_NEAR(g({0, 0}, {0, 0}), 1.25, 1e-14);
  EXPECT_NEAR(escape_time(walk::id_a(), {{0, 0}, 1.0}, {0, 0}), 1.25, 1e-14);
}

TEST(Green, IdentitiesOnRandomDisks) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> radius(5.0, 24.0);
  for (const char* name : {"id-a", "lazy-srw"}) {
    const auto law = walk::preset(name);
    for (int rep = 0; rep < 3; ++rep) {
      const Disk d{{0, 0}, radius(gen)};
      const auto g = green_disk(law, d);
      EXPECT_LT(g.residual(), 1e-10);
      EXPECT_LE(g.symmetry_defect(), 1e-9);
      EXPECT_GE(g.min_entry(), 0.0);
      // Row sums against an independent exit-time solve.
      DomainSolver s(law, g.domain());
      const auto t = s.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.size())));
      EXPECT_LT((g.exit_times() - t).lpNorm<Eigen::Infinity>(), 1e-8 * t.maxCoeff());
      // G(x,0) = P^x(T_0 < T_exit) G(0,0), with the hitting probability solved
      // on the domain minus the origin.
      std::vector<Point> rest;
      for (const auto& p : g.domain().points())
        if (!(p == Point{0, 0})) rest.push_back(p);
      DomainSolver punctured(law, Domain(rest));
      const auto h = punctured.solve(punctured.step_mass_into(Domain({Point{0, 0}})));
      double worst = 0.0;
      for (std::size_t i = 0; i < rest.size(); ++i)
        worst = std::max(worst, std::abs(g(rest[i], {0, 0}) - h[static_cast<Eigen::Index>(i)] * g({0, 0}, {0, 0})));
      EXPECT_LE(worst, 1e-9) << name << " r=" << d.radius;
    }
  }
}

TEST(Green, OriginValueGrowsLogarithmically) {
  // Exact solves; the slope is compared with 1/(pi sigma^2) for covariance
  // sigma^2 I, which is 1/pi for ID-A.
  std::vector<double> ln, g;
  for (double n : {25.0, 50.0, 100.0}) {
    ln.push_back(std::log(n));
    g.push_back(green_at_origin(walk::id_a(), n));
  }
  const double slope = (g[2] - g[0]) / (ln[2] - ln[0]);
  EXPECT_NEAR(slope, 1.0 / std::numbers::pi, 0.01);
}

TEST(Green, EscapeTimeScalesQuadraticallyAndMatchesSimulation) {
  const auto law = walk::id_a();
  std::vector<double> ratio;
  for (double n : {25.0, 50.0, 100.0}) ratio.push_back(escape_time(law, {{0, 0}, n}, {0, 0}) / (n * n));
  EXPECT_LT(*std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end()), 2.0);

  const Disk d{{0, 0}, 10.0};
  const double exact = escape_time(law, d, {3, 1});
  walk::StepSampler sampler(law);
  double sum = 0.0, sum2 = 0.0;
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) {
    walk::Stream rng(99, static_cast<std::uint64_t>(i), "escape");
    const double t = static_cast<double>(walk::run_until_exit({3, 1}, d, sampler, rng).exit_time);
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / reps, sd = std::sqrt((sum2 / reps - mean * mean) / reps);
  EXPECT_NEAR(mean, exact, 3.0 * sd);
}

TEST(Green, DomainTooLargeForFullMatrix) {
  try {
    GreenOperator g(walk::id_a(), Domain::disk({{0, 0}, 60.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainTooLarge);
  }
}

TEST(Hitting, TotalMassIsOneAndMassesNonnegative) {
  const auto h = hitting_distribution(walk::id_a(), {0, 0}, {{0, 0}, 50.0});
  EXPECT_NEAR(h.total_mass, 1.0, 1e-9);
  for (double m : h.mass) EXPECT_GE(m, 0.0);
  for (const auto& y : h.targets) EXPECT_TRUE(walk::in_band(y, {{0, 0}, 50.0}, 2.0));
}

TEST(Hitting, HeavyTailTotalMassThroughExitMass) {
  const auto h = hitting_distribution(walk::heavy(0.25), {0, 0}, {{0, 0}, 12.0}, 20.0);
  EXPECT_NEAR(h.total_mass, 1.0, 1e-9);
  double listed = 0.0;
  for (double m : h.mass) listed += m;
  EXPECT_LT(listed, h.total_mass);
  EXPECT_GT(listed, 0.9);
}

TEST(Crossing, LogRatioAtGeometricMean) {
  const auto law = walk::lazy_srw();
  const Point x{31, 6};
  EXPECT_NEAR(crossing_formula(10, 100, x, Crossing::Outward), 0.5, 0.002);
  const double p = crossing_probability(law, 10, 100, x, Crossing::Outward);
  EXPECT_NEAR(p, crossing_formula(10, 100, x, Crossing::Outward), 0.03);
  EXPECT_NEAR(p + crossing_probability(law, 10, 100, x, Crossing::Inward), 1.0, 1e-9);
}

TEST(Crossing, MonotoneAlongRayWithBoundaryLimits) {
  const auto prof = crossing_profile(walk::lazy_srw(), 10, 60);
  double prev = -1.0;
  for (std::int64_t x = 10; x < 60; ++x) {
    const double v = prof.at({x, 0});
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_LT(prof.at({10, 0}), 0.05);
  EXPECT_GT(prof.at({59, 0}), 0.95);
}

TEST(Crossing, AgreesWithSimulation) {
  const auto law = walk::lazy_srw();
  const double r = 5, R = 20;
  const Point x0{10, 3};
  const double p = crossing_probability(law, r, R, x0, Crossing::Outward);
  walk::StepSampler sampler(law);
  walk::Stream rng(5, 0, "crossing");
  const int reps = 100000;
  int out = 0;
  for (int i = 0; i < reps; ++i) {
    Point x = x0;
    while (true) {
      x = x + sampler.sample(rng);
      const double nx = walk::norm(x);
      if (nx >= R) {
        ++out;
        break;
      }
      if (nx < r) break;
    }
  }
  EXPECT_NEAR(out / double(reps), p, 3.0 * std::sqrt(p * (1 - p) / reps));
}

TEST(Crossing, GeometryChecked) {
  EXPECT_THROW(crossing_probability(walk::id_a(), 10, 20, {3, 0}, Crossing::Outward), Error);
  EXPECT_THROW(crossing_profile(walk::id_a(), 20, 10), Error);
}

TEST(GamblersRuin, RatioBandIsNarrow) {
  const auto rp = gambler_ruin_profile(walk::id_a(), 100, 0.25);
  EXPECT_LT(rp.c2 / rp.c1, 3.0);
  // Deepest point along a ray carries the largest probability.
  double best = 0.0, edge = 1.0;
  for (const auto& e : rp.ring) {
    if (e.x.y != 0 || e.x.x <= 0) continue;
    if (e.x.x == 99) edge = e.probability;
    best = std::max(best, e.probability);
  }
  for (const auto& e : rp.ring)
    if (e.x.y == 0 && e.x.x > 0) EXPECT_GE(e.probability, edge);
  EXPECT_GT(best, edge);
}

TEST(BandSkip, FiniteRangeCannotSkipWideBand) {
  for (const char* name : {"id-a", "lazy-srw"}) {
    const auto law = walk::preset(name);
    EXPECT_EQ(band_skip_probability(law, 30, law.range(), Side::Interior).probability, 0.0) << name;
    EXPECT_EQ(band_skip_probability(law, 30, law.range(), Side::Exterior).probability, 0.0) << name;
  }
}

TEST(BandSkip, HeavyInteriorDecreasesInWidth) {
  const auto law = walk::heavy(0.25);
  std::vector<double> s{2, 4, 8, 16}, p;
  for (double w : s) {
    const auto r = band_skip_probability(law, 40, w, Side::Interior);
    EXPECT_GE(r.probability, 0.0);
    EXPECT_LE(r.probability, 1.0);
    EXPECT_LT(walk::norm(r.argmax), 20.0);
    if (!p.empty()) EXPECT_LT(r.probability, p.back());
    p.push_back(r.probability);
  }
  EXPECT_LE(loglog_slope(s, p), -1.0);
}

TEST(BandSkip, HeavyExteriorReportsTruncationGap) {
  const auto r = band_skip_probability(walk::heavy(0.25), 10, 4, Side::Exterior);
  EXPECT_GT(r.probability, 0.0);
  EXPECT_LE(r.lower, r.probability);
  EXPECT_LE(r.gap, 0.05);
  EXPECT_DOUBLE_EQ(r.truncation_radius, 2.0 * 8.0 * 14.0);
  SkipOptions tight;
  tight.truncation_factor = 2.0;
  tight.truncation_budget = 1e-4;
  try {
    band_skip_probability(walk::heavy(0.25), 10, 4, Side::Exterior, tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncationBudgetExceeded);
  }
}

TEST(RingSums, EmptyRingAndLinearGrowth) {
  const auto law = walk::lazy_srw();
  EXPECT_EQ(ring_green_sum(law, 30, 35, 10), 0.0);
  std::vector<double> k, v;
  for (int i = 1; i <= 10; ++i) {
    k.push_back(i);
    v.push_back(ring_green_sum(law, 30, 90, i) / i);
  }
  EXPECT_LT(std::abs(loglog_slope(k, v)), 0.3);
}

TEST(RingSums, OneRingStepIsOrderOneOverK) {
  const auto law = walk::lazy_srw();
  double lo = 1e9, hi = 0.0;
  for (int k = 3; k <= 10; ++k) {
    const double c = k * one_ring_step(law, 30, k);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi / lo, 1.3);
}

TEST(ExteriorGreen, SymmetricAndGrowing) {
  const auto law = walk::id_a();
  // Off-diagonal values are small, so their relative gap is not budgeted here.
  const auto a = exterior_green(law, 5, {12, 0}, {0, 20}, 100, 1.0);
  const auto b = exterior_green(law, 5, {0, 20}, {12, 0}, 100, 1.0);
  EXPECT_NEAR(a.value, b.value, 1e-9);
  EXPECT_LE(a.lower, a.value);
  std::vector<double> lx, g;
  for (std::int64_t x : {10, 20, 40}) {
    const auto e = exterior_green(law, 5, {x, 0}, {x, 0}, 160);
    EXPECT_LT(e.gap, 0.05);
    lx.push_back(std::log(double(x)));
    g.push_back(e.value);
  }
  EXPECT_GT(g[1] - g[0], 0.0);
  EXPECT_GT(g[2] - g[1], 0.0);
  try {
    exterior_green(law, 5, {1, 0}, {12, 0}, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GeometryInvalid);
  }
}

TEST(Overshoot, HeavyTailDecaysMonotonically) {
  const auto o = overshoot_profile(walk::heavy(0.25), 40, {1, 2, 4, 8, 16});
  EXPECT_NEAR(o.total_mass, 1.0, 1e-9);
  for (std::size_t i = 1; i < o.points.size(); ++i) EXPECT_LT(o.points[i].probability, o.points[i - 1].probability);
  EXPECT_LT(o.slope, -2.0);
}

TEST(CrossCheck, SolveAgreesWithHittingIdentity) {
  const auto c = p23_cross_check(walk::id_a(), 12);
  EXPECT_LT(c.max_difference, 1e-4);
  EXPECT_GT(c.pairs, 0u);
}
