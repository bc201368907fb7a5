#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace lwb::history {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// m = (m_2, ..., m_n), each >= 1. A history is a +-1 path on {0..n} from 1
// that first hits 0 at time |m| = 2 sum m_j + 1 and makes exactly m_l
// upcrossings l-1 -> l.
struct HistorySpec {
  int n = 2;
  std::vector<std::uint64_t> m;

  std::uint64_t length() const;  // |m|
  std::uint64_t at(int level) const { return m[static_cast<std::size_t>(level - 2)]; }
};

// Throws ConfigInvalid.
HistorySpec history_spec(int n, std::vector<std::uint64_t> m);

BigInt binomial(std::uint64_t n, std::uint64_t k);

// prod_{l=2}^{n-1} C(m_{l+1} + m_l - 1, m_l - 1), exact.
BigInt count_histories(const HistorySpec& spec);

// All histories as level sequences phi(0..|m|). Throws CapExceeded when
// |m| > cap.
std::vector<std::vector<int>> enumerate_histories(const HistorySpec& spec, std::uint64_t cap = 15);

// Every spec with |m| <= max_length (n >= 2).
std::vector<HistorySpec> all_specs(std::uint64_t max_length);

// I(x) = -(1+x) log(1+x) + x log x + x log 2 + log 2.
double rate_function(double x);

// Frequency targets and windows: m ~_k N_k means m = 1 for k < k0 and
// |m - N_k| <= k otherwise, N_k = 3 a k^2 log k kept real.
struct Windows {
  double a = 1.0;
  int k0 = 4;

  double target(int k) const;
  std::uint64_t lo(int k) const;
  std::uint64_t hi(int k) const;
};

// k0 <= 0 takes the literal 4 v inf{k : N_k >= 2k}.
Windows windows(double a, int k0 = 0);

struct StirlingBand {
  double value = 0.0;  // C(m+l, l) 2^-(m+l+1)
  double value_lower = 0.0, value_upper = 0.0;
  double reference = 0.0;  // k^(-3a-1) / sqrt(log k)
  double ratio = 0.0;
};

// Exact-interval evaluation at one window point. Throws OutOfWindow unless
// |m - N_{k+1}| <= k+1 and |l + 1 - N_k| <= k.
StirlingBand stirling_band(int k, double a, std::uint64_t m, std::uint64_t l);

struct StirlingSweep {
  double a = 0.0;
  int k_lo = 0, k_hi = 0;
  double min_ratio = 0.0, max_ratio = 0.0;
  double C = 0.0;  // smallest C with every ratio in [1/C, C]
  double spread = 0.0;  // max_ratio / min_ratio
  int argmin_k = 0, argmax_k = 0;
  std::uint64_t points = 0;
};

// Scans every integer window point for k in [k_lo, k_hi]; the two extreme
// points are re-evaluated with stirling_band.
StirlingSweep stirling_sweep(double a, int k_lo, int k_hi);

struct LadderSumOptions {
  int k0 = 0;             // <= 0: literal
  int first = 2;          // product over l = first .. last-1
  int last = 0;           // <= 0: n
  int min_digits = 50;    // relative interval width below 10^-min_digits
  int max_bits = 4096;
};

struct LadderSumResult {
  double a = 0.0;
  int n = 0;
  std::string value;  // decimal, lower end of the interval
  double log_value = 0.0;
  BigRational lower, upper;  // exact interval ends
  double relative_width = 0.0;
  int precision_bits = 0;
  // factors[0] = number of m_first values, factors[j] = T_{first+j} / T_{first+j-1}
  // with T_l the partial sum through level l; the product is the value.
  std::vector<double> log_factors;
  double delta1 = 0.0;  // -log(value)/log(n!) - 3a
  double delta2 = 0.0;  // -log(value)/log(r_{n,0}) - a, r_{n,0} = e^n n^{3n}
};

// Sum over window vectors of prod C(m_{l+1}+m_l-1, m_l-1) (1/2)^{m_{l+1}+m_l}
// by dynamic programming along the chain, in MPFR interval arithmetic.
// Throws PrecisionBudgetExceeded for n > 60 or when max_bits is not enough.
LadderSumResult ladder_sum(double a, int n, const LadderSumOptions& opts = {});

// Same sum by enumerating the window grid in exact rationals. Throws
// CapExceeded above max_points grid points.
BigRational ladder_sum_brute(double a, int n, const LadderSumOptions& opts = {},
                             std::uint64_t max_points = 2000000);

struct SuccessBand {
  double lower = 0.0;
  double upper = 0.0;
  double log_sum = 0.0;
};

// c/log n * S <= Q_n <= c'/log n * S with S = ladder_sum(a, n).
SuccessBand success_probability_band(double a, int n, double c, double c_prime);

// Desk form: the sum weighted by exact top-level factors,
// p_open * p_01 * S / 4 * p_escape, each factor given as [lo, hi].
struct TopFactors {
  double open_lo = 1.0, open_hi = 1.0;
  double enter_lo = 0.0, enter_hi = 0.0;   // band 0 -> band 1 before the kill
  double escape_lo = 0.0, escape_hi = 0.0;  // band 0 -> killed before D(r'_1)
};

SuccessBand success_probability_band(double a, int n, const TopFactors& top);

struct PaleyZygmund {
  double bound = 0.0;      // (1-lambda)^2 (EW)^2 / E W^2
  double empirical = -1.0;  // P(W >= lambda EW), -1 without samples
  double sigma = 0.0;
  bool consistent = true;  // empirical >= bound - 3 sigma
};

// Throws DegenerateW when EW = 0.
PaleyZygmund paley_zygmund_bound(double mean, double second_moment, double lambda);
PaleyZygmund paley_zygmund_bound(const std::vector<double>& samples, double lambda);

}  // namespace lwb::history
