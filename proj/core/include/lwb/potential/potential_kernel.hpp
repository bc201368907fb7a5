#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lwb/potential/transition.hpp"

namespace lwb::potential {

struct PotentialKernelOptions {
  // Series cutoff; 0 selects floor(box^2 / log^2 box).
  int n_cut = 0;
  // Truncated-box margin in standard deviations of the n_cut-step walk.
  double margin_sigmas = 8.5;
  double fit_r_min = 40.0;
  double fit_r_max = 80.0;
  // Coefficient of log|x| in the shell fit.
  double log_coefficient = 0.0;  // 0 selects 2/pi
};

struct TruncationReport {
  int n_cut = 0;
  std::int64_t grid_half = 0;
  double mass_loss = 0.0;
  std::string tail_method;
};

class PotentialKernelModel {
 public:
  std::int64_t box = 0;
  Grid table;  // a(x) on [-box, box]^2
  // Parts of the decomposition, each on the same grid:
  // i1 = sum_{n<N} [p_n(0) - q_n(0)] (a constant), i2 = sum_n [q_n(0) - q_n(x)]
  // with the n >= N tail in closed form, i3 = sum_{n<N} [q_n(x) - p_n(x)].
  double i1 = 0.0;
  Grid i2;
  Grid i3;
  double k_hat = 0.0;
  double log_coefficient = 0.0;
  double shell_max_deviation = 0.0;
  double shell_free_slope = 0.0;  // unconstrained least-squares slope on log|x|
  std::size_t shell_points = 0;
  TruncationReport truncation;

  double operator()(Point x) const { return table.at(x); }
  bool covers(Point x) const { return table.in(x); }
  // max over 0 < |x| < radius of |sum_y p(y-x) a(y) - a(x)|, and the value of
  // sum_y p(y) a(y) at 0 (which should equal 1).
  double harmonicity_residual(const walk::JumpLaw& law, double radius) const;
  double origin_excess(const walk::JumpLaw& law) const;
};

// Requires a strongly aperiodic symmetric law.
PotentialKernelModel potential_kernel(const walk::JumpLaw& law, std::int64_t box,
                                      const PotentialKernelOptions& opts = {});

// sum_{n >= N} (1 - exp(-c/n)) / n by Euler-Maclaurin around the exact
// integral Ein(c/N); c >= 0.
double gaussian_tail_sum(double c, int N);

}  // namespace lwb::potential
