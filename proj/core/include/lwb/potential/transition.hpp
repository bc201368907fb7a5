#pragma once

#include <cstdint>
#include <vector>

#include "lwb/walk/jump_law.hpp"

namespace lwb::potential {

using walk::Point;

// Square grid [-half, half]^2, row-major.
struct Grid {
  std::int64_t half = 0;
  std::vector<double> v;

  Grid() = default;
  explicit Grid(std::int64_t h) : half(h), v(static_cast<std::size_t>((2 * h + 1) * (2 * h + 1)), 0.0) {}
  std::int64_t side() const { return 2 * half + 1; }
  bool in(Point p) const { return p.x >= -half && p.x <= half && p.y >= -half && p.y <= half; }
  double& at(Point p) { return v[static_cast<std::size_t>((p.y + half) * side() + (p.x + half))]; }
  double at(Point p) const { return v[static_cast<std::size_t>((p.y + half) * side() + (p.x + half))]; }
  double sum() const;
};

// Iterates p_n on a truncated box; mass leaving the box is dropped and
// accounted. Finite-range laws use the explicit stencil, tail laws an FFT
// convolution with the kernel truncated to the box diameter.
class TransitionIterator {
 public:
  TransitionIterator(const walk::JumpLaw& law, std::int64_t box_half);
  ~TransitionIterator();

  const Grid& current() const { return p_; }
  int n() const { return n_; }
  void step();
  // Total mass dropped so far (1 - sum of the grid).
  double mass_loss() const { return 1.0 - p_.sum(); }

 private:
  struct Impl;
  const walk::JumpLaw& law_;
  Grid p_;
  Grid scratch_;
  int n_ = 0;
  std::int64_t support_ = 0;
  Impl* impl_ = nullptr;
};

struct TransitionResult {
  Grid p;
  double mass_loss = 0.0;
};

// p_n on [-box, box]^2. Throws BoxTooSmall for finite-range laws when the
// dropped mass exceeds `loss_budget`; tail laws only report it.
TransitionResult transition_probabilities(const walk::JumpLaw& law, int n, std::int64_t box,
                                          double loss_budget = 1e-12);

// q_n(x) = exp(-|x|^2/2n) / (2 pi n), q_0 = 1{x=0}.
double gaussian_kernel(int n, Point x);

// Same with covariance matrix C (q_n for C = I).
double gaussian_kernel(int n, Point x, const walk::Covariance& c);

struct LcltPoint {
  int n = 0;
  double sup_error = 0.0;
  double mass_loss = 0.0;
};

struct LcltFit {
  std::vector<LcltPoint> points;
  double slope = 0.0;  // least squares of log sup_error on log n
};

// sup_x |p_n(x) - q_n(x)| for n in [n_min, n_max] (every `stride`), with q
// the Gaussian of the law's covariance, and the log-log decay slope.
LcltFit lclt_decay(const walk::JumpLaw& law, int n_min, int n_max, int stride, std::int64_t box,
                   bool match_covariance = true);

}  // namespace lwb::potential
