#include "lwb/potential/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "fft_conv.hpp"
#include "lwb/error.hpp"

namespace lwb::potential {

using SpMat = Eigen::SparseMatrix<double>;

struct DomainSolver::Impl {
  // finite range
  SpMat m;
  std::optional<Eigen::SimplicialLDLT<SpMat>> ldlt;
  // tail laws: P_A x by FFT over the bounding box
  std::unique_ptr<detail::BoxConvolver> conv;
  mutable std::vector<double> box_in, box_out;
};

DomainSolver::DomainSolver(const walk::JumpLaw& law, Domain domain, SolverOptions opts)
    : law_(law), domain_(std::move(domain)), opts_(opts), impl_(std::make_unique<Impl>()) {
  const auto n = static_cast<Eigen::Index>(domain_.size());
  if (law_.finite_range()) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(domain_.size() * (law_.core().size() + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
      t.emplace_back(i, i, 1.0);
      const auto& p = domain_[static_cast<std::size_t>(i)];
      for (const auto& e : law_.core()) {
        const auto j = domain_.index(p + e.offset);
        if (j >= 0) t.emplace_back(i, static_cast<Eigen::Index>(j), -e.p);
      }
    }
    impl_->m.resize(n, n);
    impl_->m.setFromTriplets(t.begin(), t.end());
    impl_->m.makeCompressed();
    if (domain_.size() <= opts_.direct_cap) {
      impl_->ldlt.emplace(impl_->m);
      if (impl_->ldlt->info() != Eigen::Success)
        throw Error(ErrorCode::SolverDivergence, "sparse factorization failed");
    }
  } else {
    impl_->conv = std::make_unique<detail::BoxConvolver>(law_, domain_.width(), domain_.height());
  }
}

DomainSolver::~DomainSolver() = default;
DomainSolver::DomainSolver(DomainSolver&&) noexcept = default;
DomainSolver& DomainSolver::operator=(DomainSolver&&) noexcept = default;

Eigen::VectorXd DomainSolver::apply(const Eigen::VectorXd& x) const {
  if (law_.finite_range()) return impl_->m * x;
  auto& in = impl_->box_in;
  auto& out = impl_->box_out;
  const auto w = domain_.width();
  in.assign(static_cast<std::size_t>(w * domain_.height()), 0.0);
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    const auto& p = domain_[i];
    in[static_cast<std::size_t>((p.y - domain_.ymin()) * w + (p.x - domain_.xmin()))] = x[static_cast<Eigen::Index>(i)];
  }
  impl_->conv->apply(in, out);
  Eigen::VectorXd y(x.size());
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    const auto& p = domain_[i];
    y[static_cast<Eigen::Index>(i)] =
        x[static_cast<Eigen::Index>(i)] -
        out[static_cast<std::size_t>((p.y - domain_.ymin()) * w + (p.x - domain_.xmin()))];
  }
  return y;
}

Eigen::VectorXd DomainSolver::solve(const Eigen::VectorXd& b, SolveReport* report) const {
  SolveReport rep;
  Eigen::VectorXd x;
  const std::size_t max_it =
      opts_.max_iterations ? opts_.max_iterations
                           : static_cast<std::size_t>(20.0 * std::sqrt(static_cast<double>(size()))) + 2000;
  if (impl_->ldlt) {
    rep.method = "ldlt";
    x = impl_->ldlt->solve(b);
  } else if (law_.finite_range()) {
    rep.method = "cg";
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg(impl_->m);
    cg.setTolerance(opts_.cg_rel_tol);
    cg.setMaxIterations(static_cast<Eigen::Index>(max_it));
    x = cg.solve(b);
    rep.iterations = static_cast<std::size_t>(cg.iterations());
  } else {
    // Conjugate gradient with the FFT operator; the Jacobi preconditioner is
    // the constant 1 - p(0) and is folded into the scaling.
    rep.method = "fft-cg";
    x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b;
    Eigen::VectorXd d = r;
    double rr = r.squaredNorm();
    // Relative target, floored well below the absolute residual contract so
    // tiny right-hand sides do not chase FFT round-off.
    const double floor_tol = 1e-3 * opts_.residual_tol;
    const double stop = std::max(opts_.cg_rel_tol * opts_.cg_rel_tol * b.squaredNorm(), floor_tol * floor_tol);
    std::size_t it = 0;
    while (rr > stop && it < max_it) {
      const Eigen::VectorXd ad = apply(d);
      const double dad = d.dot(ad);
      if (!(dad > 0.0)) break;
      const double alpha = rr / dad;
      x += alpha * d;
      r -= alpha * ad;
      const double rr_new = r.squaredNorm();
      d = r + (rr_new / rr) * d;
      rr = rr_new;
      ++it;
      // Restart from the true residual now and then to stop drift.
      if (it % 200 == 0) {
        r = b - apply(x);
        rr = r.squaredNorm();
        d = r;
      }
    }
    rep.iterations = it;
  }
  rep.residual = (apply(x) - b).lpNorm<Eigen::Infinity>();
  if (report) *report = rep;
  if (!(rep.residual < opts_.residual_tol))
    throw Error(ErrorCode::SolverDivergence,
                rep.method + " residual " + std::to_string(rep.residual) + " above tolerance");
  return x;
}

Eigen::VectorXd DomainSolver::step_mass_into(const Domain& target) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  if (target.size() == 0) return out;
  if (law_.finite_range()) {
    for (std::size_t i = 0; i < size(); ++i) {
      double s = 0.0;
      for (const auto& e : law_.core())
        if (target.contains(domain_[i] + e.offset)) s += e.p;
      out[static_cast<Eigen::Index>(i)] = s;
    }
    return out;
  }
  // Correlate the target indicator with the kernel on the joint bounding box.
  const auto x0 = std::min(domain_.xmin(), target.xmin());
  const auto y0 = std::min(domain_.ymin(), target.ymin());
  const auto x1 = std::max(domain_.xmin() + domain_.width(), target.xmin() + target.width());
  const auto y1 = std::max(domain_.ymin() + domain_.height(), target.ymin() + target.height());
  const auto w = x1 - x0, h = y1 - y0;
  detail::BoxConvolver conv(law_, w, h);
  std::vector<double> in(static_cast<std::size_t>(w * h), 0.0), res;
  for (const auto& p : target.points()) in[static_cast<std::size_t>((p.y - y0) * w + (p.x - x0))] = 1.0;
  conv.apply(in, res);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& p = domain_[i];
    out[static_cast<Eigen::Index>(i)] = std::max(0.0, res[static_cast<std::size_t>((p.y - y0) * w + (p.x - x0))]);
  }
  return out;
}

Eigen::VectorXd DomainSolver::exit_mass() const {
  Eigen::VectorXd inside = step_mass_into(domain_);
  const double total = law_.total_mass();
  return (total - inside.array()).max(0.0).matrix();
}

}  // namespace lwb::potential
