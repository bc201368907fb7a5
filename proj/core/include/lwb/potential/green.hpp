#pragma once

#include <vector>

#include <Eigen/Core>

#include "lwb/potential/solver.hpp"

namespace lwb::potential {

// Full Green matrix G_A(x,y) = expected visits to y from x before leaving A.
class GreenOperator {
 public:
  GreenOperator(const walk::JumpLaw& law, Domain domain, const SolverOptions& opts = {},
                std::size_t full_cap = 8000);

  const Domain& domain() const { return domain_; }
  const Eigen::MatrixXd& matrix() const { return g_; }
  double operator()(Point x, Point y) const;
  double at(std::size_t i, std::size_t j) const { return g_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }

  // max |(I - P_A) G - I|
  double residual() const { return residual_; }
  double symmetry_defect() const;
  double min_entry() const { return g_.minCoeff(); }
  // Row sums: expected exit times.
  Eigen::VectorXd exit_times() const { return g_.rowwise().sum(); }

 private:
  Domain domain_;
  Eigen::MatrixXd g_;
  double residual_ = 0.0;
};

GreenOperator green_disk(const walk::JumpLaw& law, const walk::Disk& disk, const SolverOptions& opts = {});

// Column y of G_A, which by symmetry is also the row: G_A(., y).
Eigen::VectorXd green_column(const DomainSolver& s, Point y, SolveReport* rep = nullptr);

// G_{D(0,n)}(0,0).
double green_at_origin(const walk::JumpLaw& law, double n, SolveReport* rep = nullptr);

// E^x T_{A^c}.
double escape_time(const walk::JumpLaw& law, const walk::Disk& disk, Point x, SolveReport* rep = nullptr);

struct HittingDistribution {
  Point source;
  std::vector<Point> targets;
  std::vector<double> mass;
  double total_mass = 0.0;
  double residual = 0.0;
};

// Law of the exit point X_T from disk, T = first exit time, by the last exit
// decomposition H(x,y) = sum_z G(x,z) p(y-z). For tail laws targets beyond
// `cap_radius` are lumped into total_mass only.
HittingDistribution hitting_distribution(const walk::JumpLaw& law, Point from, const walk::Disk& disk,
                                         double cap_radius = 0.0);

}  // namespace lwb::potential
