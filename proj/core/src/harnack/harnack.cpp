#include "lwb/harnack/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "lwb/error.hpp"
#include "lwb/potential/green.hpp"

namespace lwb::harnack {

using potential::Domain;
using potential::DomainSolver;

namespace {

const Point kOrigin{0, 0};

Point round_point(double x, double y) { return {std::llround(x), std::llround(y)}; }

// `count` points spread by angle from candidates satisfying `ok`, starting
// from the lattice point nearest radius rho.
std::vector<Point> ring_sources(double rho, int count, const auto& ok) {
  std::vector<Point> out;
  std::set<Point> seen;
  for (int j = 0; j < count; ++j) {
    const double th = 2.0 * std::numbers::pi * j / count;
    const Point c = round_point(rho * std::cos(th), rho * std::sin(th));
    Point best = c;
    bool found = false;
    for (std::int64_t d = 0; d <= 3 && !found; ++d)
      for (std::int64_t dy = -d; dy <= d && !found; ++dy)
        for (std::int64_t dx = -d; dx <= d && !found; ++dx) {
          const Point p{c.x + dx, c.y + dy};
          if (ok(p) && !seen.count(p)) {
            best = p;
            found = true;
          }
        }
    if (found) {
      seen.insert(best);
      out.push_back(best);
    }
  }
  return out;
}

std::vector<Point> spread_by_angle(std::vector<Point> cand, int count) {
  std::sort(cand.begin(), cand.end(), [](const Point& a, const Point& b) {
    const double ta = std::atan2(double(a.y), double(a.x)), tb = std::atan2(double(b.y), double(b.x));
    return ta != tb ? ta < tb : a < b;
  });
  if (static_cast<int>(cand.size()) <= count) return cand;
  std::vector<Point> out;
  for (int j = 0; j < count; ++j) out.push_back(cand[cand.size() * static_cast<std::size_t>(j) / static_cast<std::size_t>(count)]);
  return out;
}

// One-step mass from the domain into each candidate point.
std::vector<double> mass_into(const walk::JumpLaw& law, const Domain& dom, const std::vector<Point>& ys) {
  std::vector<double> m(ys.size(), 0.0);
  if (law.finite_range()) {
    const Domain yd(ys);
    for (const auto& z : dom.points())
      for (const auto& e : law.core()) {
        const auto k = yd.index(z + e.offset);
        if (k >= 0) m[static_cast<std::size_t>(k)] += e.p;
      }
    return m;
  }
  for (std::size_t k = 0; k < ys.size(); ++k)
    for (const auto& z : dom.points()) m[k] += law.prob(ys[k] - z);
  return m;
}

// H(x, y_k) = sum_z g(z) p(y_k - z) for one Green column g = G(x, .).
std::vector<double> hit_row(const walk::JumpLaw& law, const Domain& dom, const Eigen::VectorXd& g,
                            const std::vector<Point>& ys) {
  std::vector<double> h(ys.size(), 0.0);
  if (law.finite_range()) {
    const Domain yd(ys);
    for (std::size_t i = 0; i < dom.size(); ++i)
      for (const auto& e : law.core()) {
        const auto k = yd.index(dom[i] + e.offset);
        if (k >= 0) h[static_cast<std::size_t>(k)] += g[static_cast<Eigen::Index>(i)] * e.p;
      }
    return h;
  }
  for (std::size_t k = 0; k < ys.size(); ++k)
    for (std::size_t i = 0; i < dom.size(); ++i) h[k] += g[static_cast<Eigen::Index>(i)] * law.prob(ys[k] - dom[i]);
  return h;
}

void fill_ratios(HarnackReport& rep) {
  rep.max_ratio = 1.0;
  for (std::size_t k = 0; k < rep.targets.size(); ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& row : rep.h) {
      lo = std::min(lo, row[k]);
      hi = std::max(hi, row[k]);
    }
    if (!(lo > 0.0)) throw Error(ErrorCode::GeometryInvalid, "hitting probability vanishes at a sampled target");
    rep.max_ratio = std::max(rep.max_ratio, hi / lo);
  }
  rep.min_ratio = 1.0 / rep.max_ratio;
}

std::string describe(const HarnackReport& rep) {
  std::ostringstream os;
  os << rep.sources.size() << " sources, " << rep.targets.size() << " targets spread by angle";
  return os.str();
}

}  // namespace

HarnackReport interior_harnack_ratio(const walk::JumpLaw& law, double r, double R, double band,
                                     const SampleSpec& spec) {
  if (!(r >= 1.0 && R > r && band > 0.0)) throw Error(ErrorCode::GeometryInvalid, "need 1 <= r < R and band > 0");
  HarnackReport rep;
  rep.side = "interior";
  rep.r = r;
  rep.R = R;
  rep.band = band;
  const walk::Disk outer{kOrigin, R}, inner{kOrigin, r};
  DomainSolver solver(law, Domain::disk(outer));

  rep.sources.push_back(kOrigin);
  if (spec.sources > 1) {
    auto ring = ring_sources(0.7 * r, spec.sources - 1, [&](Point p) { return inner.contains(p) && !(p == kOrigin); });
    rep.sources.insert(rep.sources.end(), ring.begin(), ring.end());
  }

  std::vector<Point> cand;
  for (const auto& y : walk::annulus_points(kOrigin, R, R + band + 1.0))
    if (walk::in_band(y, outer, band)) cand.push_back(y);
  const auto m = mass_into(law, solver.domain(), cand);
  std::vector<Point> reach;
  for (std::size_t k = 0; k < cand.size(); ++k)
    if (m[k] > 0.0) reach.push_back(cand[k]);
  rep.targets = spread_by_angle(std::move(reach), spec.targets);

  for (const auto& x : rep.sources) {
    const auto g = potential::green_column(solver, x);
    rep.h.push_back(hit_row(law, solver.domain(), g, rep.targets));
  }
  fill_ratios(rep);
  rep.grid = describe(rep);
  return rep;
}

HarnackReport exterior_harnack_ratio(const walk::JumpLaw& law, double r, double R, double band,
                                     double truncation_radius, ExteriorMode mode, const SampleSpec& spec,
                                     double budget) {
  if (!(r >= 1.0 && R > r + band && band > 0.0))
    throw Error(ErrorCode::GeometryInvalid, "need 1 <= r, r + band < R and band > 0");
  if (!(truncation_radius > R + band + 1.0))
    throw Error(ErrorCode::GeometryInvalid, "truncation radius must exceed the source band");
  HarnackReport rep;
  rep.side = "exterior";
  rep.r = r;
  rep.R = R;
  rep.band = band;
  rep.truncation_radius = truncation_radius;
  rep.conditioned = mode == ExteriorMode::Conditioned;
  const walk::Disk hit{kOrigin, r + band}, small{kOrigin, r}, far{kOrigin, R};

  rep.sources = ring_sources(R + band / 2.0, spec.sources, [&](Point p) { return walk::in_band(p, far, band); });

  auto solve_rows = [&](double K, std::vector<double>* escape_free) {
    DomainSolver solver(law, Domain::annulus(kOrigin, r + band, K));
    if (rep.targets.empty()) {
      std::vector<Point> cand;
      for (const auto& y : walk::annulus_points(kOrigin, r, r + band))
        if (walk::in_band(y, small, band)) cand.push_back(y);
      const auto m = mass_into(law, solver.domain(), cand);
      std::vector<Point> reach;
      for (std::size_t k = 0; k < cand.size(); ++k)
        if (m[k] > 0.0) reach.push_back(cand[k]);
      rep.targets = spread_by_angle(std::move(reach), spec.targets);
    }
    const Eigen::VectorXd into = escape_free ? solver.step_mass_into(Domain::disk(hit)) : Eigen::VectorXd();
    std::vector<std::vector<double>> rows;
    for (const auto& x : rep.sources) {
      const auto g = potential::green_column(solver, x);
      rows.push_back(hit_row(law, solver.domain(), g, rep.targets));
      if (escape_free) escape_free->push_back(g.dot(into));
    }
    return rows;
  };

  if (mode == ExteriorMode::Unconditioned) {
    const auto lo = solve_rows(truncation_radius, nullptr);
    rep.h = solve_rows(2.0 * truncation_radius, nullptr);
    rep.truncation_radius = 2.0 * truncation_radius;
    for (std::size_t i = 0; i < lo.size(); ++i)
      for (std::size_t k = 0; k < lo[i].size(); ++k)
        rep.gap = std::max(rep.gap, (rep.h[i][k] - lo[i][k]) / rep.h[i][k]);
    if (rep.gap > budget)
      throw Error(ErrorCode::TruncationBudgetExceeded,
                  "exterior hitting truncation gap " + std::to_string(rep.gap) + " exceeds budget");
  } else {
    std::vector<double> p_hit;
    rep.h = solve_rows(truncation_radius, &p_hit);
    if (mode == ExteriorMode::Conditioned)
      for (std::size_t i = 0; i < rep.h.size(); ++i)
        for (auto& v : rep.h[i]) v /= p_hit[i];
  }
  fill_ratios(rep);
  rep.grid = describe(rep);
  return rep;
}

}  // namespace lwb::harnack
