#include "lwb/potential/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lwb/error.hpp"
#include "lwb/potential/green.hpp"

namespace lwb::potential {

namespace {

const Point kOrigin{0, 0};

Domain band_domain(const walk::Disk& d, double s) {
  std::vector<Point> pts;
  const double outer = d.radius + s + 2.0;
  for (const auto& p : walk::annulus_points(d.center, d.radius - 1.0, outer))
    if (walk::in_band(p, d, s)) pts.push_back(p);
  return Domain(std::move(pts));
}

double loglog_slope(const std::vector<std::pair<double, double>>& xy) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (const auto& [x, y] : xy) {
    if (!(x > 0.0 && y > 0.0)) continue;
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    m += 1.0;
  }
  if (m < 2.0) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void check_annulus(double r, double R) {
  if (!(r > 0.0 && R > r)) throw Error(ErrorCode::GeometryInvalid, "annulus needs 0 < r < R");
}

}  // namespace

double DomainProfile::at(Point x) const {
  const auto i = domain.index(x);
  if (i < 0) throw Error(ErrorCode::GeometryInvalid, "point outside the solved domain");
  return value[i];
}

DomainProfile crossing_profile(const walk::JumpLaw& law, double r, double R, Crossing dir) {
  check_annulus(r, R);
  DomainProfile out;
  DomainSolver s(law, Domain::annulus(kOrigin, r, R));
  // Outward: one step leaves D(0,R) without landing in D(0,r).
  const Domain inner = Domain::disk({kOrigin, r});
  const Eigen::VectorXd into_inner = s.step_mass_into(inner);
  const Eigen::VectorXd rhs = dir == Crossing::Inward ? into_inner : Eigen::VectorXd((s.exit_mass() - into_inner).cwiseMax(0.0));
  out.value = s.solve(rhs, &out.report);
  out.domain = s.domain();
  return out;
}

double crossing_probability(const walk::JumpLaw& law, double r, double R, Point x, Crossing dir) {
  const double nx = walk::norm(x);
  if (!(nx >= r && nx < R)) throw Error(ErrorCode::GeometryInvalid, "start must satisfy r <= |x| < R");
  return crossing_profile(law, r, R, dir).at(x);
}

double crossing_formula(double r, double R, Point x, Crossing dir) {
  const double nx = walk::norm(x);
  const double out = std::log(nx / r) / std::log(R / r);
  return dir == Crossing::Outward ? out : 1.0 - out;
}

RuinProfile gambler_ruin_profile(const walk::JumpLaw& law, double n, double delta, double epsilon) {
  if (!(delta > 0.0 && delta < 1.0) || !(epsilon > delta && epsilon < 1.0))
    throw Error(ErrorCode::GeometryInvalid, "need 0 < delta < epsilon < 1");
  RuinProfile rp;
  rp.n = n;
  rp.delta = delta;
  rp.epsilon = epsilon;
  const auto prof = crossing_profile(law, delta * n, n, Crossing::Inward);
  rp.report = prof.report;
  rp.c1 = std::numeric_limits<double>::infinity();
  rp.c2 = 0.0;
  for (std::size_t i = 0; i < prof.domain.size(); ++i) {
    const Point x = prof.domain[i];
    const double nx = walk::norm(x);
    if (nx < epsilon * n) continue;
    RuinEntry e{x, n - nx, prof.value[static_cast<Eigen::Index>(i)], 0.0};
    e.ratio = e.probability * n / std::max(e.rho, 1.0);
    rp.c1 = std::min(rp.c1, e.ratio);
    rp.c2 = std::max(rp.c2, e.ratio);
    rp.ring.push_back(e);
  }
  return rp;
}

SkipResult band_skip_probability(const walk::JumpLaw& law, double n, double s, Side side, const SkipOptions& opts) {
  if (!(s >= 1.0)) throw Error(ErrorCode::ConfigInvalid, "band width must be at least 1");
  if (!(n > 1.0)) throw Error(ErrorCode::GeometryInvalid, "radius must exceed 1");
  SkipResult res;
  const walk::Disk disk{kOrigin, n};
  if (side == Side::Interior) {
    DomainSolver solver(law, Domain::disk(disk));
    const Domain band = band_domain(disk, s);
    Eigen::VectorXd q;
    if (law.finite_range()) {
      // Direct sums so an unreachable region gives exactly zero.
      q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(solver.size()));
      for (std::size_t i = 0; i < solver.size(); ++i)
        for (const auto& e : law.core()) {
          const Point y = solver.domain()[i] + e.offset;
          if (!disk.contains(y) && !band.contains(y)) q[static_cast<Eigen::Index>(i)] += e.p;
        }
    } else {
      q = (solver.exit_mass() - solver.step_mass_into(band)).cwiseMax(0.0);
    }
    if (q.maxCoeff() == 0.0) {
      res.argmax = kOrigin;
      return res;
    }
    const auto u = solver.solve(q, &res.report);
    res.probability = -1.0;
    for (std::size_t i = 0; i < solver.size(); ++i) {
      if (walk::norm(solver.domain()[i]) >= n / 2.0) continue;
      if (u[static_cast<Eigen::Index>(i)] > res.probability) {
        res.probability = u[static_cast<Eigen::Index>(i)];
        res.argmax = solver.domain()[i];
      }
    }
    res.probability = std::clamp(res.probability, 0.0, 1.0);
    return res;
  }

  // Exterior: killed at K and at 2K.
  const double inner = n + s;
  std::vector<Point> bad;
  for (const auto& p : walk::disk_points({kOrigin, inner}))
    if (!walk::in_band(p, disk, s)) bad.push_back(p);
  const Domain bad_set(std::move(bad));
  auto solve_at = [&](double K, SkipResult& r) {
    DomainSolver solver(law, Domain::annulus(kOrigin, inner, K));
    const Eigen::VectorXd q = solver.step_mass_into(bad_set);
    if (q.maxCoeff() == 0.0) {
      r.probability = 0.0;
      r.argmax = solver.domain()[0];
      return;
    }
    const auto u = solver.solve(q, &r.report);
    Eigen::Index arg = 0;
    r.probability = std::clamp(u.maxCoeff(&arg), 0.0, 1.0);
    r.argmax = solver.domain()[static_cast<std::size_t>(arg)];
  };
  const double K = opts.truncation_factor * inner;
  SkipResult lo;
  solve_at(K, lo);
  solve_at(2.0 * K, res);
  res.lower = lo.probability;
  res.truncation_radius = 2.0 * K;
  res.gap = res.probability > 0.0 ? (res.probability - res.lower) / res.probability : 0.0;
  if (res.gap > opts.truncation_budget)
    throw Error(ErrorCode::TruncationBudgetExceeded,
                "exterior skip truncation gap " + std::to_string(res.gap) + " exceeds budget");
  return res;
}

double ring_green_sum(const walk::JumpLaw& law, double r, double R, int k) {
  check_annulus(r, R);
  DomainSolver solver(law, Domain::annulus(kOrigin, r, R));
  Eigen::VectorXd ind = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(solver.size()));
  for (std::size_t i = 0; i < solver.size(); ++i) {
    const double ny = walk::norm(solver.domain()[i]);
    if (ny > r + k - 1 && ny <= r + k) ind[static_cast<Eigen::Index>(i)] = 1.0;
  }
  if (ind.sum() == 0.0) return 0.0;
  return solver.solve(ind).maxCoeff();
}

double one_ring_step(const walk::JumpLaw& law, double r, int k) {
  if (k < 3) throw Error(ErrorCode::GeometryInvalid, "ring step needs k >= 3");
  const auto prof = crossing_profile(law, r, r + k, Crossing::Inward);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < prof.domain.size(); ++i)
    if (walk::norm(prof.domain[i]) < r + k - 2) m = std::min(m, prof.value[static_cast<Eigen::Index>(i)]);
  return m;
}

ExteriorGreen exterior_green(const walk::JumpLaw& law, double n, Point x, Point y, double truncation_radius,
                             double budget) {
  const walk::Disk d{kOrigin, n};
  if (d.contains(x) || d.contains(y)) throw Error(ErrorCode::GeometryInvalid, "points must lie outside D(0,n)");
  if (!(walk::norm(x) < truncation_radius && walk::norm(y) < truncation_radius))
    throw Error(ErrorCode::GeometryInvalid, "truncation radius must exceed |x| and |y|");
  auto at = [&](double K) {
    DomainSolver solver(law, Domain::annulus(kOrigin, n, K));
    const auto g = green_column(solver, y);
    return g[solver.domain().index(x)];
  };
  ExteriorGreen eg;
  eg.lower = at(truncation_radius);
  eg.value = at(2.0 * truncation_radius);
  eg.truncation_radius = truncation_radius;
  eg.gap = (eg.value - eg.lower) / eg.value;
  if (eg.gap > budget)
    throw Error(ErrorCode::TruncationBudgetExceeded, "exterior Green truncation gap " + std::to_string(eg.gap));
  return eg;
}

OvershootProfile overshoot_profile(const walk::JumpLaw& law, double n, const std::vector<double>& ks) {
  DomainSolver solver(law, Domain::disk({kOrigin, n}));
  const auto g = green_column(solver, kOrigin);
  OvershootProfile out;
  out.total_mass = g.dot(solver.exit_mass());
  const double total = law.total_mass();
  std::vector<std::pair<double, double>> xy;
  for (double k : ks) {
    const Domain big = Domain::disk({kOrigin, n + k * std::pow(n, 0.75)});
    const Eigen::VectorXd beyond = (total - solver.step_mass_into(big).array()).max(0.0).matrix();
    out.points.push_back({k, std::max(0.0, g.dot(beyond))});
    xy.emplace_back(k, out.points.back().probability);
  }
  out.slope = loglog_slope(xy);
  return out;
}

CrossCheck p23_cross_check(const walk::JumpLaw& law, double radius, const PotentialKernelOptions& pk) {
  if (!law.finite_range()) throw Error(ErrorCode::ConfigInvalid, "identity cross-check needs a finite-range law");
  const walk::Disk disk{kOrigin, radius};
  const GreenOperator G(law, Domain::disk(disk));
  const auto& pts = G.domain().points();
  const auto box = static_cast<std::int64_t>(std::ceil(2.0 * radius + law.range())) + 1;
  PotentialKernelOptions opts = pk;
  // The default cutoff for a ~45 box leaves ~2e-4 of truncation error.
  if (opts.n_cut == 0) opts.n_cut = 400;
  const auto a = potential_kernel(law, box, opts);
  const auto m = static_cast<Eigen::Index>(pts.size());
  // M(w, z) = sum over exterior y of p(y - w) a(y - z).
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index w = 0; w < m; ++w)
    for (const auto& e : law.core()) {
      const Point y = pts[static_cast<std::size_t>(w)] + e.offset;
      if (disk.contains(y)) continue;
      for (Eigen::Index z = 0; z < m; ++z) M(w, z) += e.p * a(y - pts[static_cast<std::size_t>(z)]);
    }
  const Eigen::MatrixXd rhs = G.matrix() * M;
  CrossCheck cc;
  cc.kernel_box = static_cast<double>(box);
  cc.n_cut = a.truncation.n_cut;
  for (Eigen::Index x = 0; x < m; ++x)
    for (Eigen::Index z = 0; z < m; ++z) {
      const double v = rhs(x, z) - a(pts[static_cast<std::size_t>(x)] - pts[static_cast<std::size_t>(z)]);
      cc.max_difference = std::max(cc.max_difference, std::abs(v - G.at(static_cast<std::size_t>(x), static_cast<std::size_t>(z))));
    }
  cc.pairs = static_cast<std::size_t>(m * m);
  return cc;
}

}  // namespace lwb::potential
