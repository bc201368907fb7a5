#include "lwb/harness/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "lwb/census/census.hpp"
#include "lwb/error.hpp"
#include "lwb/excursion/excursion.hpp"
#include "lwb/harnack/harnack.hpp"
#include "lwb/history/history.hpp"
#include "lwb/localtime/local_time.hpp"
#include "lwb/potential/estimates.hpp"
#include "lwb/potential/green.hpp"
#include "lwb/potential/potential_kernel.hpp"
#include "lwb/potential/transition.hpp"
#include "lwb/walk/presets.hpp"

namespace lwb::harness {

namespace {

using walk::Point;

std::string sci(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

struct Ctx {
  Profile profile;
  int threads;
  bool full() const { return profile == Profile::Full; }
};

CriterionResult start(int id, const char* name) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  return r;
}

// ---- 1 ----------------------------------------------------------------------

CriterionResult c1_identities(const Ctx& ctx) {
  auto r = start(1, "exact identity suite");
  r.budget_seconds = 60;
  r.band = "residual < 1e-10, symmetry <= 1e-9, factorization <= 1e-9, moments k<=4 <= 1e-8";
  const std::vector<double> radii = ctx.full() ? std::vector<double>{12, 25, 40} : std::vector<double>{12, 25};
  double res = 0, sym = 0, mark = 0, mom = 0;
  for (const char* name : {"id-a", "lazy-srw"}) {
    const auto law = walk::preset(name);
    for (double R : radii) {
      const auto g = potential::green_disk(law, {{0, 0}, R});
      res = std::max(res, g.residual());
      sym = std::max(sym, g.symmetry_defect());
      std::vector<Point> rest;
      for (const auto& p : g.domain().points())
        if (!(p == Point{0, 0})) rest.push_back(p);
      potential::DomainSolver punctured(law, potential::Domain(rest));
      const auto h = punctured.solve(punctured.step_mass_into(potential::Domain({Point{0, 0}})));
      for (std::size_t i = 0; i < rest.size(); ++i)
        mark = std::max(mark, std::abs(g(rest[i], {0, 0}) - h[static_cast<Eigen::Index>(i)] * g({0, 0}, {0, 0})));
      const Point x0{std::llround(R / 3), std::llround(R / 5)};
      const auto lt = localtime::local_time_law(law, R, x0);
      for (int k = 1; k <= 4; ++k)
        mom = std::max(mom, std::abs(lt.rising_moment(k) / localtime::local_time_moments(law, R, x0, k) - 1.0));
    }
  }
  r.measured = "residual " + sci(res) + ", symmetry " + sci(sym) + ", factorization " + sci(mark) +
               ", moments (relative) " + sci(mom);
  r.passed = res < 1e-10 && sym <= 1e-9 && mark <= 1e-9 && mom <= 1e-8;
  return r;
}

// ---- 2 ----------------------------------------------------------------------

CriterionResult c2_kernel(const Ctx&) {
  auto r = start(2, "potential kernel");
  r.budget_seconds = 300;
  r.band = "a(0) = 0, harmonicity < 1e-6 on the 128-box, shell deviation from (2/pi)log|x| + k < 5e-3 on [40,80]";
  bool ok = true;
  std::ostringstream m;
  for (const char* name : {"lazy-srw", "id-a"}) {
    const auto law = walk::preset(name);
    const auto pk = potential::potential_kernel(law, 128);
    const double harm = pk.harmonicity_residual(law, 128.0 - law.range());
    const bool zero = pk({0, 0}) == 0.0;
    ok = ok && zero && harm < 1e-6 && pk.shell_max_deviation < 5e-3;
    m << name << ": a(0)=" << pk({0, 0}) << " harmonicity " << sci(harm) << " shell deviation "
      << sci(pk.shell_max_deviation) << " (free slope " << sci(pk.shell_free_slope, 4) << "); ";
  }
  r.measured = m.str();
  r.passed = ok;
  r.known_failure = true;
  r.note = "2/pi is the coefficient for covariance I/2; these laws have slopes 1/(pi sigma^2)";
  return r;
}

// ---- 3 ----------------------------------------------------------------------

CriterionResult c3_green(const Ctx& ctx) {
  auto r = start(3, "Green growth");
  r.budget_seconds = 300;
  r.band = "slope of G(0,0) on log n within 5% of 2/pi";
  const std::vector<double> ns =
      ctx.full() ? std::vector<double>{50, 100, 200, 400} : std::vector<double>{50, 100, 200};
  std::vector<double> x, y;
  for (double n : ns) {
    x.push_back(std::log(n));
    y.push_back(potential::green_at_origin(walk::id_a(), n));
  }
  const double s = slope_of(x, y);
  const double target = 2.0 / std::numbers::pi;
  r.measured = "ID-A slope " + sci(s, 5) + " = " + sci(s / target, 4) + " x 2/pi (" + sci(s * std::numbers::pi, 4) +
               " x 1/pi)";
  r.passed = std::abs(s / target - 1.0) < 0.05;
  r.known_failure = true;
  r.note = "identity covariance gives 1/pi";
  return r;
}

// ---- 4 ----------------------------------------------------------------------

CriterionResult c4_lclt(const Ctx& ctx) {
  auto r = start(4, "local CLT decay");
  r.budget_seconds = 300;
  r.band = "fitted exponent <= -1.3 over n in [20,200], every strongly aperiodic preset";
  bool ok = true;
  std::ostringstream m;
  for (const char* name : {"id-a", "srw", "lazy-srw", "heavy-beta0.25"}) {
    const auto law = walk::preset(name);
    if (!law.strongly_aperiodic()) {
      m << name << ": periodic, skipped; ";
      continue;
    }
    const std::int64_t box = law.finite_range() ? static_cast<std::int64_t>(law.range() * 200) + 1 : 400;
    const auto fit = potential::lclt_decay(law, 20, 200, ctx.full() ? 20 : 60, box);
    ok = ok && fit.slope <= -1.3;
    m << name << " " << sci(fit.slope, 4) << "; ";
  }
  r.measured = m.str();
  r.passed = ok;
  return r;
}

// ---- 5 ----------------------------------------------------------------------

CriterionResult c5_crossing(const Ctx&) {
  auto r = start(5, "crossing formula");
  r.budget_seconds = 60;
  r.band = "max over r <= |x| < R of |exact - log-ratio| <= 0.03, r=10, R=100, both directions";
  bool ok = true;
  std::ostringstream m;
  for (const char* name : {"lazy-srw", "id-a"}) {
    const auto law = walk::preset(name);
    double worst = 0.0, mid = 0.0, worst_r = 0.0;
    for (auto dir : {potential::Crossing::Outward, potential::Crossing::Inward}) {
      const auto prof = potential::crossing_profile(law, 10, 100, dir);
      for (std::size_t i = 0; i < prof.domain.size(); ++i) {
        const Point x = prof.domain[i];
        const double d = std::abs(prof.value[static_cast<Eigen::Index>(i)] - potential::crossing_formula(10, 100, x, dir));
        if (d > worst) {
          worst = d;
          worst_r = walk::norm(x);
        }
        if (std::abs(walk::norm(x) - std::sqrt(1000.0)) < 0.5) mid = std::max(mid, d);
      }
    }
    ok = ok && worst <= 0.03;
    m << name << ": max " << sci(worst) << " at |x|=" << sci(worst_r) << ", on |x|~31.6 " << sci(mid) << "; ";
  }
  r.measured = m.str();
  r.passed = ok;
  r.known_failure = true;
  r.note = "the excess sits at the inner boundary and decays in |x|-r; within 0.03 on |x| ~ 31.6";
  return r;
}

// ---- 6 ----------------------------------------------------------------------

CriterionResult c6_ruin(const Ctx&) {
  auto r = start(6, "gambler's ruin shape");
  r.budget_seconds = 300;
  r.band = "c2/c1 < 3 for each n in {50,100,200} and the [c1,c2] bands overlap (delta = 1/4)";
  bool ok = true;
  std::ostringstream m;
  for (const char* name : {"id-a", "lazy-srw"}) {
    const auto law = walk::preset(name);
    double lo = 0.0, hi = 1e300;
    m << name << ":";
    for (double n : {50.0, 100.0, 200.0}) {
      const auto rp = potential::gambler_ruin_profile(law, n, 0.25);
      ok = ok && rp.c2 / rp.c1 < 3.0;
      lo = std::max(lo, rp.c1);
      hi = std::min(hi, rp.c2);
      m << " [" << sci(rp.c1) << "," << sci(rp.c2) << "]";
    }
    ok = ok && lo < hi;
    m << "; ";
  }
  r.measured = m.str();
  r.passed = ok;
  return r;
}

// ---- 7 ----------------------------------------------------------------------

CriterionResult c7_histories(const Ctx&) {
  auto r = start(7, "history counting");
  r.budget_seconds = 120;
  r.band = "count = enumeration for all |m| <= 13; DP = brute force for n <= 4";
  std::size_t specs = 0, bad = 0, sums = 0, sum_bad = 0;
  for (const auto& s : history::all_specs(13)) {
    ++specs;
    bad += history::count_histories(s) != history::enumerate_histories(s).size();
  }
  for (int k0 : {0, 2})
    for (double a : {0.5, 1.0})
      for (int n = 2; n <= 4; ++n) {
        history::LadderSumOptions o;
        o.k0 = k0;
        const auto dp = history::ladder_sum(a, n, o);
        const auto b = history::ladder_sum_brute(a, n, o);
        ++sums;
        sum_bad += !(dp.lower <= b && b <= dp.upper);
      }
  r.measured = std::to_string(specs) + " specs, " + std::to_string(bad) + " mismatches; " + std::to_string(sums) +
               " ladder sums, " + std::to_string(sum_bad) + " outside the DP interval";
  r.passed = bad == 0 && sum_bad == 0;
  return r;
}

// ---- 8 ----------------------------------------------------------------------

CriterionResult c8_stirling(const Ctx&) {
  auto r = start(8, "Stirling band");
  r.budget_seconds = 120;
  r.band = "one C < 50 with ratio in [1/C, C] for k in [10,200], a in {0.5, 1}";
  double C = 0.0;
  std::ostringstream m;
  for (double a : {0.5, 1.0}) {
    const auto s = history::stirling_sweep(a, 10, 200);
    C = std::max(C, s.C);
    m << "a=" << a << ": ratio in [" << sci(s.min_ratio) << " (k=" << s.argmin_k << "), " << sci(s.max_ratio)
      << " (k=" << s.argmax_k << ")], C " << sci(s.C, 4) << ", sqrt spread " << sci(std::sqrt(s.spread)) << "; ";
  }
  r.measured = m.str() + "C = " + sci(C, 4);
  r.passed = C < 50.0;
  r.known_failure = true;
  r.note = "the reference carries no constant and the windows move l*I(m/l) by about +-2";
  return r;
}

// ---- 9 ----------------------------------------------------------------------

CriterionResult c9_localtime(const Ctx& ctx) {
  auto r = start(9, "local-time law");
  r.budget_seconds = 120;
  r.band = "chi-square p > 0.01, radius 30, 1e5 replicas";
  const auto law = walk::id_a();
  const auto lt = localtime::local_time_law(law, 30, {5, 0});
  const std::uint64_t n = ctx.full() ? 100000 : 20000;
  const auto samples = localtime::simulate_local_times(law, 30, {5, 0}, n, 2024);
  const auto cs = localtime::chi_square_test(lt, samples);
  r.measured = "ID-A from (5,0): chi2 " + sci(cs.statistic, 4) + " on " + std::to_string(cs.dof) + " dof, p " +
               sci(cs.p_value) + " (" + std::to_string(n) + " replicas)";
  r.passed = cs.p_value > 0.01;
  for (auto o : cs.observed) r.payload += std::to_string(o) + ",";
  r.payload += hex(cs.statistic);
  return r;
}

// ---- 10 ---------------------------------------------------------------------

CriterionResult c10_harnack(const Ctx&) {
  auto r = start(10, "Harnack trend");
  r.budget_seconds = 600;
  r.band = "max ratio closer to 1 at scale ratio 20 than at 5, interior and exterior";
  bool ok = true;
  std::ostringstream m;
  for (const char* name : {"lazy-srw", "id-a"}) {
    const auto law = walk::preset(name);
    const auto i5 = harnack::interior_harnack_ratio(law, 20, 100, 2);
    const auto i20 = harnack::interior_harnack_ratio(law, 5, 100, 2);
    const auto e5 = harnack::exterior_harnack_ratio(law, 4, 20, 2, 40);
    const auto e20 = harnack::exterior_harnack_ratio(law, 4, 80, 2, 160);
    ok = ok && i20.max_ratio < i5.max_ratio && e20.max_ratio < e5.max_ratio;
    m << name << ": interior " << sci(i5.max_ratio, 4) << " -> " << sci(i20.max_ratio, 4) << ", exterior "
      << sci(e5.max_ratio, 4) << " -> " << sci(e20.max_ratio, 4) << "; ";
  }
  r.measured = m.str();
  r.passed = ok;
  return r;
}

// ---- 11 ---------------------------------------------------------------------

CriterionResult c11_psi(const Ctx& ctx) {
  auto r = start(11, "frequent-point exponent");
  r.budget_seconds = 1800;
  r.band = "slope of log|Psi| on log radius within (2-a) +- 0.35, a in {0.5, 1}, radii {500,1000,2000}, 20 replicas";
  const auto radii = ctx.full() ? std::vector<double>{500, 1000, 2000} : std::vector<double>{250, 500, 1000};
  const std::uint64_t reps = ctx.full() ? 20 : 10;
  const auto fits = census::psi_exponent(walk::id_a(), radii, {0.5, 1.0}, reps, 11, ctx.threads);
  bool ok = true;
  std::ostringstream m;
  m << "ID-A:";
  for (const auto& f : fits) {
    ok = ok && std::isfinite(f.slope) && std::abs(f.slope - (2.0 - f.a)) <= 0.35;
    m << " a=" << f.a << " slope " << sci(f.slope, 4) << " (mean counts";
    for (double c : f.mean_counts) {
      m << " " << sci(c, 4);
      r.payload += hex(c) + ",";
    }
    m << ");";
  }
  r.measured = m.str();
  r.passed = ok;
  r.known_failure = true;
  r.note = "with Green slope 1/pi the 2a/pi level acts as level 2a, exponent 2-2a";
  return r;
}

// ---- 12 ---------------------------------------------------------------------

CriterionResult c12_et(const Ctx& ctx) {
  auto r = start(12, "Erdos-Taylor trend");
  r.budget_seconds = 3600;
  r.band = "median L*/(log n)^2 increasing over n in {1e4,1e5,1e6}, inside (0.05, 0.45)";
  const auto cps = ctx.full() ? std::vector<std::uint64_t>{10000, 100000, 1000000}
                              : std::vector<std::uint64_t>{1000, 10000, 100000};
  const std::uint64_t reps = ctx.full() ? 50 : 20;
  const auto s = census::et_ratio_series(walk::lazy_srw(), cps, reps, 5, ctx.threads);
  bool ok = true;
  std::ostringstream m;
  m << "lazy-SRW, " << reps << " replicas, medians";
  for (std::size_t j = 0; j < cps.size(); ++j) {
    ok = ok && s.median[j] > 0.05 && s.median[j] < 0.45;
    if (j > 0) ok = ok && s.median[j] > s.median[j - 1];
    m << " " << sci(s.median[j], 4) << " [" << sci(s.q1[j]) << "," << sci(s.q3[j]) << "]";
    r.payload += hex(s.median[j]) + ",";
  }
  r.measured = m.str();
  r.passed = ok;
  r.note = "the limit 1/pi is not attainable at desk scale; the covariance-adjusted limit for lazy-SRW is 1/(0.8 pi)";
  return r;
}

// ---- 13 ---------------------------------------------------------------------

CriterionResult c13_time(const Ctx& ctx) {
  auto r = start(13, "time exponent");
  r.budget_seconds = 300;
  r.band = "median log T / log n in [1.85, 2.25] at n = 500, 200 replicas";
  const auto te = census::time_exponent(walk::id_a(), {500}, 200, 13, ctx.threads);
  r.measured = "ID-A median " + sci(te[0].median, 4);
  r.passed = te[0].median >= 1.85 && te[0].median <= 2.25;
  for (double e : te[0].exponents) r.payload += hex(e) + ",";
  return r;
}

// ---- 14 ---------------------------------------------------------------------

CriterionResult c14_decoupling(const Ctx& ctx) {
  auto r = start(14, "decoupling diagnostic");
  r.budget_seconds = 1800;
  r.band = "TV < 0.1 at lambda = 5 and decreasing in lambda (3, 5, 8)";
  excursion::DecouplingOptions o;
  o.replicas = ctx.full() ? 20000 : 5000;
  o.seed = 1;
  std::vector<double> tv;
  std::ostringstream m;
  m << "ID-A exit-side TV";
  for (double lam : {3.0, 5.0, 8.0}) {
    const auto rep = excursion::decoupling_diagnostic(walk::id_a(), excursion::geometric_ladder(4 * lam * lam, lam, 2), o);
    tv.push_back(rep.tv);
    m << " lambda=" << lam << ": " << sci(rep.tv) << " (se " << sci(rep.tv_se, 2) << ", null " << sci(rep.tv_null, 2)
      << ")";
    r.payload += hex(rep.tv) + "," + hex(rep.tv_null) + ",";
  }
  const bool below = tv[1] < 0.1, falling = tv[0] > tv[1] && tv[1] > tv[2];
  r.measured = m.str() + "; threshold " + (below ? "met" : "missed") + ", trend " + (falling ? "decreasing" : "not decreasing");
  r.passed = below && falling;
  r.known_failure = true;
  r.note = "exit-point dependence is a harmonic-measure effect of order 1/lambda";
  return r;
}

using Runner = CriterionResult (*)(const Ctx&);

constexpr Runner kRunners[] = {c1_identities, c2_kernel,  c3_green,      c4_lclt,   c5_crossing,
                               c6_ruin,       c7_histories, c8_stirling, c9_localtime, c10_harnack,
                               c11_psi,       c12_et,     c13_time,      c14_decoupling};

constexpr const char* kNames[] = {
    "exact identity suite", "potential kernel", "Green growth", "local CLT decay", "crossing formula",
    "gambler's ruin shape", "history counting", "Stirling band", "local-time law", "Harnack trend",
    "frequent-point exponent", "Erdos-Taylor trend", "time exponent", "decoupling diagnostic"};

CriterionResult timed(int id, const Ctx& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = kRunners[id - 1](ctx);
  } catch (const std::exception& e) {
    r = start(id, kNames[id - 1]);
    r.measured = std::string("error: ") + e.what();
    r.passed = false;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (ctx.full() && r.budget_seconds > 0 && r.seconds > r.budget_seconds) {
    r.passed = false;
    r.measured += " (over the time budget)";
  }
  return r;
}

}  // namespace

Profile parse_profile(const std::string& s) {
  if (s == "quick") return Profile::Quick;
  if (s == "full") return Profile::Full;
  throw Error(ErrorCode::ConfigInvalid, "profile must be quick or full");
}

bool VerifyReport::all_passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed; });
}

bool VerifyReport::only_known_failures() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed || c.known_failure; });
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream o;
  o << (r.passed ? "[PASS] " : r.known_failure ? "[FAIL, known] " : "[FAIL] ") << r.id << " " << r.name << ": "
    << r.measured << " | band: " << r.band << " | " << sci(r.seconds) << "s";
  if (!r.note.empty()) o << " | note: " << r.note;
  return o.str();
}

VerifyReport verify_all(const VerifyOptions& opts) {
  VerifyReport rep;
  rep.profile = opts.profile;
  const Ctx ctx{opts.profile, opts.threads};
  auto wanted = [&](int id) { return opts.only.empty() || std::count(opts.only.begin(), opts.only.end(), id) > 0; };
  std::vector<std::pair<int, std::string>> payloads;
  for (int id = 1; id <= 14; ++id) {
    if (!wanted(id)) continue;
    auto r = timed(id, ctx);
    if (!r.payload.empty()) payloads.emplace_back(id, r.payload);
    if (opts.progress) *opts.progress << format_line(r) << std::endl;
    rep.criteria.push_back(std::move(r));
  }
  if (wanted(15)) {
    auto d = start(15, "determinism");
    d.band = "every stochastic criterion re-run with its seed is byte-identical";
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream m;
    bool ok = !payloads.empty();
    try {
      if (payloads.empty())
        for (int id : {9, 11, 12, 13, 14}) payloads.emplace_back(id, kRunners[id - 1](ctx).payload);
      for (const auto& [id, first] : payloads) {
        const bool same = kRunners[id - 1](ctx).payload == first;
        ok = ok && same;
        m << id << (same ? " identical" : " DIFFERENT") << "; ";
      }
      // replica-indexed streams: the worker count does not matter
      const Ctx wide{ctx.profile, std::max(2, ctx.threads + 1)};
      const bool same = c13_time(wide).payload == c13_time(ctx).payload;
      ok = ok && same;
      m << "13 with " << wide.threads << " threads" << (same ? " identical" : " DIFFERENT");
    } catch (const std::exception& e) {
      ok = false;
      m << "error: " << e.what();
    }
    d.measured = m.str();
    d.passed = ok;
    d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opts.progress) *opts.progress << format_line(d) << std::endl;
    rep.criteria.push_back(std::move(d));
  }
  return rep;
}

}  // namespace lwb::harness
