#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "lwb/potential/potential_kernel.hpp"
#include "lwb/potential/solver.hpp"

namespace lwb::potential {

// Values of a harmonic function on a finite domain from one linear solve.
struct DomainProfile {
  Domain domain;
  Eigen::VectorXd value;
  SolveReport report;

  double at(Point x) const;
  double max() const { return value.size() ? value.maxCoeff() : 0.0; }
};

enum class Crossing { Outward, Inward };

// Outward: P^x(T_{D(0,R)^c} < T_{D(0,r)}); inward is the complement. Annulus
// r <= |x| < R.
DomainProfile crossing_profile(const walk::JumpLaw& law, double r, double R, Crossing dir = Crossing::Outward);
double crossing_probability(const walk::JumpLaw& law, double r, double R, Point x, Crossing dir);
// log(|x|/r)/log(R/r) or log(R/|x|)/log(R/r).
double crossing_formula(double r, double R, Point x, Crossing dir);

struct RuinEntry {
  Point x;
  double rho = 0.0;  // n - |x|
  double probability = 0.0;
  double ratio = 0.0;  // probability * n / max(rho, 1)
};

struct RuinProfile {
  double n = 0.0, delta = 0.0, epsilon = 0.0;
  std::vector<RuinEntry> ring;
  double c1 = 0.0, c2 = 0.0;  // min and max ratio
  SolveReport report;
};

// P^x(T_{D(0,delta n)} < T_{D(0,n)^c}) for x in D(0,n) \ D(0,epsilon n).
RuinProfile gambler_ruin_profile(const walk::JumpLaw& law, double n, double delta, double epsilon = 0.5);

enum class Side { Interior, Exterior };

struct SkipOptions {
  // Exterior truncation radius K = factor * (n + s); the solve is repeated at 2K.
  double truncation_factor = 8.0;
  double truncation_budget = 0.05;  // relative gap between K and 2K
};

struct SkipResult {
  double probability = 0.0;
  Point argmax;
  // Exterior only: value at radius K (a lower bound) and relative gap to 2K.
  double lower = 0.0;
  double gap = 0.0;
  double truncation_radius = 0.0;
  SolveReport report;
};

// Interior: sup over x in D(0,n/2) of P^x(X_T not in the s-band of D(0,n)),
// T the exit time of D(0,n). Exterior: sup over x outside D(0,n+s) of the
// probability that the walk enters D(0,n+s) outside the s-band of D(0,n).
SkipResult band_skip_probability(const walk::JumpLaw& law, double n, double s, Side side,
                                 const SkipOptions& opts = {});

// max over x in A = D(0,R) \ D(0,r) of sum over the ring r+k-1 < |y| <= r+k of G_A(x,y).
double ring_green_sum(const walk::JumpLaw& law, double r, double R, int k);

// min over x in D(0,r+k-2) \ D(0,r) of P^x(T_{D(0,r)} < T_{D(0,r+k)^c}).
double one_ring_step(const walk::JumpLaw& law, double r, int k);

struct ExteriorGreen {
  double value = 0.0;  // truncated at 2K
  double lower = 0.0;  // truncated at K
  double gap = 0.0;    // (value - lower) / value
  double truncation_radius = 0.0;
};

// G_{D(0,n)^c}(x,y), approximated on the annulus n <= |z| < K and again at 2K.
ExteriorGreen exterior_green(const walk::JumpLaw& law, double n, Point x, Point y, double truncation_radius,
                             double budget = 0.05);

struct OvershootPoint {
  double k = 0.0;
  double probability = 0.0;  // P^0(|X_T| >= n + k n^{3/4})
};

struct OvershootProfile {
  std::vector<OvershootPoint> points;
  double slope = 0.0;  // log-log fit over the positive points
  double total_mass = 0.0;
};

OvershootProfile overshoot_profile(const walk::JumpLaw& law, double n, const std::vector<double>& ks);

struct CrossCheck {
  double max_difference = 0.0;
  double kernel_box = 0.0;
  int n_cut = 0;
  std::size_t pairs = 0;
};

// Compares G_A from the linear solve with the hitting-distribution identity
// G_A(x,z) = sum_y H(x,y) a(y-z) - a(x-z) on the disk of the given radius.
// Finite-range laws only. An unset n_cut means 400.
CrossCheck p23_cross_check(const walk::JumpLaw& law, double radius, const PotentialKernelOptions& pk = {});

}  // namespace lwb::potential
