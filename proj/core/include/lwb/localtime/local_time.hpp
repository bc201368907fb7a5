#pragma once

#include <cstdint>
#include <vector>

#include "lwb/walk/jump_law.hpp"
#include "lwb/walk/lattice.hpp"

namespace lwb::localtime {

using walk::Point;

// Law of L = #{i < T : X_i = 0}, T the exit time of D(0,R), started at x0:
// L = 0 with probability 1 - h, otherwise geometric on {1, 2, ...} with
// success probability 1/g, i.e. P(L = n | L >= 1) = (1/g)(1 - 1/g)^{n-1}.
struct LocalTimeLaw {
  double radius = 0.0;
  Point x0;
  double h = 0.0;     // P^{x0}(T_0 < T_exit), from the domain with 0 removed
  double g = 0.0;     // G(0,0)
  double g_x0 = 0.0;  // G(x0,0)

  double pmf(std::uint64_t n) const;
  double tail(std::uint64_t n) const;  // P(L >= n)
  double power_moment(int k) const;    // E L^k
  double rising_moment(int k) const;   // E L(L+1)...(L+k-1) = h k! g^k
  // E exp(-lambda L) in closed form 1 - h + h / ((e^lambda - 1) g + 1).
  double laplace(double lambda) const;
  // Same by summing the mass function.
  double laplace_direct(double lambda) const;
};

LocalTimeLaw local_time_law(const walk::JumpLaw& law, double radius, Point x0);

// k! G(x0,0) G(0,0)^{k-1} from one Green column. This is the rising
// factorial moment E L(L+1)...(L+k-1); for k >= 2 it exceeds E L^k.
double local_time_moments(const walk::JumpLaw& law, double radius, Point x0, int k);

struct TailBoundReport {
  std::vector<double> z;
  std::vector<double> exact;  // P(L >= z G(0,0))
  double c_min = 0.0;         // smallest c with exact <= c sqrt(z) e^{-z} on the grid
};

TailBoundReport tail_bound_check(const LocalTimeLaw& lt, const std::vector<double>& z_grid);

struct LaplaceReport {
  std::vector<double> phi;
  std::vector<double> exact;    // closed form
  std::vector<double> leading;  // 1 - log(R/|x0|)/log R * phi/(1+phi)
  double max_closed_vs_direct = 0.0;
  double max_deviation = 0.0;  // max |exact - leading|
};

// lambda = phi / G(0,0).
LaplaceReport laplace_transform_check(const LocalTimeLaw& lt, const std::vector<double>& phi_grid);

// Local times at 0 of independent walks from x0 until exit of D(0,R); replica
// i uses stream (seed, i, "localtime").
std::vector<std::uint64_t> simulate_local_times(const walk::JumpLaw& law, double radius, Point x0,
                                                std::uint64_t replicas, std::uint64_t seed);

struct ChiSquareReport {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
  std::vector<std::uint64_t> bin_lo;  // bins [lo_i, lo_{i+1}), last open
  std::vector<double> expected;
  std::vector<std::uint64_t> observed;
};

// Bins of consecutive values merged until each expects >= min_expected.
ChiSquareReport chi_square_test(const LocalTimeLaw& lt, const std::vector<std::uint64_t>& samples,
                                double min_expected = 5.0);

}  // namespace lwb::localtime
