#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lwb/potential/domain.hpp"
#include "lwb/walk/jump_law.hpp"

namespace lwb::potential {

struct SolverOptions {
  std::size_t direct_cap = 40000;  // sparse LDLT up to this many states
  double residual_tol = 1e-10;     // max-norm of (I - P_A) x - b
  double cg_rel_tol = 1e-14;
  std::size_t max_iterations = 0;  // 0: 20 * sqrt(states) + 2000
};

struct SolveReport {
  std::string method;  // "ldlt", "cg", "fft-cg"
  std::size_t iterations = 0;
  double residual = 0.0;
};

// (I - P_A) restricted to a finite domain A, with P_A the substochastic
// restriction of the law. Symmetric positive definite for a symmetric law.
class DomainSolver {
 public:
  DomainSolver(const walk::JumpLaw& law, Domain domain, SolverOptions opts = {});
  ~DomainSolver();
  DomainSolver(DomainSolver&&) noexcept;
  DomainSolver& operator=(DomainSolver&&) noexcept;

  const Domain& domain() const { return domain_; }
  const walk::JumpLaw& law() const { return law_; }
  std::size_t size() const { return domain_.size(); }

  // y = (I - P_A) x
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  // Solves (I - P_A) x = b; throws SolverDivergence when the residual
  // exceeds the tolerance.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, SolveReport* report = nullptr) const;

  // Mass of one step from each domain point into the set S (given by a
  // membership test over its bounding box); used for hitting right-hand sides.
  Eigen::VectorXd step_mass_into(const Domain& target) const;
  // Mass of one step from each domain point that leaves the domain.
  Eigen::VectorXd exit_mass() const;

 private:
  struct Impl;
  walk::JumpLaw law_;
  Domain domain_;
  SolverOptions opts_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lwb::potential
