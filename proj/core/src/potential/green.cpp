#include "lwb/potential/green.hpp"

#include <cmath>
#include <map>

#include "lwb/error.hpp"

namespace lwb::potential {

GreenOperator::GreenOperator(const walk::JumpLaw& law, Domain domain, const SolverOptions& opts,
                             std::size_t full_cap)
    : domain_(std::move(domain)) {
  const auto n = static_cast<Eigen::Index>(domain_.size());
  if (domain_.size() > full_cap)
    throw Error(ErrorCode::DomainTooLarge,
                std::to_string(domain_.size()) + " states exceed the full-matrix cap " + std::to_string(full_cap));
  DomainSolver s(law, domain_, opts);
  g_.resize(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    g_.col(j) = s.solve(e);
    e[j] = 0.0;
  }
  residual_ = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd r = s.apply(g_.col(j));
    r[j] -= 1.0;
    residual_ = std::max(residual_, r.lpNorm<Eigen::Infinity>());
  }
}

double GreenOperator::operator()(Point x, Point y) const {
  const auto i = domain_.index(x), j = domain_.index(y);
  if (i < 0 || j < 0) return 0.0;
  return g_(i, j);
}

double GreenOperator::symmetry_defect() const { return (g_ - g_.transpose()).cwiseAbs().maxCoeff(); }

GreenOperator green_disk(const walk::JumpLaw& law, const walk::Disk& disk, const SolverOptions& opts) {
  return GreenOperator(law, Domain::disk(disk), opts);
}

Eigen::VectorXd green_column(const DomainSolver& s, Point y, SolveReport* rep) {
  const auto j = s.domain().index(y);
  if (j < 0) throw Error(ErrorCode::GeometryInvalid, "point outside the domain");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size()));
  e[j] = 1.0;
  return s.solve(e, rep);
}

double green_at_origin(const walk::JumpLaw& law, double n, SolveReport* rep) {
  DomainSolver s(law, Domain::disk({{0, 0}, n}));
  const auto g = green_column(s, {0, 0}, rep);
  return g[s.domain().index({0, 0})];
}

double escape_time(const walk::JumpLaw& law, const walk::Disk& disk, Point x, SolveReport* rep) {
  DomainSolver s(law, Domain::disk(disk));
  const auto i = s.domain().index(x);
  if (i < 0) throw Error(ErrorCode::GeometryInvalid, "start outside the domain");
  const auto t = s.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.size())), rep);
  return t[i];
}

HittingDistribution hitting_distribution(const walk::JumpLaw& law, Point from, const walk::Disk& disk,
                                         double cap_radius) {
  DomainSolver s(law, Domain::disk(disk));
  SolveReport rep;
  const auto g = green_column(s, from, &rep);
  HittingDistribution h;
  h.source = from;
  h.residual = rep.residual;
  std::map<Point, double> acc;
  const auto& pts = s.domain().points();
  if (law.finite_range()) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double gi = g[static_cast<Eigen::Index>(i)];
      for (const auto& e : law.core()) {
        const Point y = pts[i] + e.offset;
        if (!disk.contains(y)) acc[y] += gi * e.p;
      }
    }
  } else {
    // Targets within the cap by direct sums, the rest through exit masses.
    const double cap = cap_radius > 0.0 ? cap_radius : disk.radius + 16.0;
    const auto ring = walk::annulus_points(disk.center, disk.radius, cap);
    for (const auto& y : ring) {
      double m = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) m += g[static_cast<Eigen::Index>(i)] * law.prob(y - pts[i]);
      if (m > 0.0) acc[y] = m;
    }
  }
  for (const auto& [y, m] : acc) {
    h.targets.push_back(y);
    h.mass.push_back(m);
  }
  if (law.finite_range()) {
    for (double m : h.mass) h.total_mass += m;
  } else {
    h.total_mass = g.dot(s.exit_mass());
  }
  return h;
}

}  // namespace lwb::potential
