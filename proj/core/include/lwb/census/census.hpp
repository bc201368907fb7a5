#pragma once

#include <cstdint>
#include <vector>

#include "lwb/walk/jump_law.hpp"
#include "lwb/walk/lattice.hpp"
#include "lwb/walk/walker.hpp"

namespace lwb::census {

using walk::Point;

enum class Mode {
  FixedTime,  // L^x_n over times 0..n; threshold alpha, level alpha/pi (log n)^2
  ExitDisk,   // L^x before leaving D(0,n), x in D(0,n); threshold a, level 2a/pi (log n)^2
};

// Level for one threshold in units of local time; (log n)^2 times 1/pi or 2/pi.
double census_level(Mode mode, double n, double threshold);

struct CensusResult {
  Mode mode = Mode::ExitDisk;
  double n = 0.0;
  double threshold = 0.0;
  std::uint64_t count = 0;
  std::uint32_t l_star = 0;
  Point top_site{};
  std::uint64_t distinct_sites = 0;
  std::uint64_t steps = 0;  // n, or the exit time
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
};

struct CensusConfig {
  Mode mode = Mode::ExitDisk;
  double n = 1000.0;  // steps or radius
  std::vector<double> thresholds{0.5};
  std::uint64_t replicas = 1;
  std::uint64_t seed = 1;
  std::uint64_t max_steps = std::uint64_t{1} << 36;
  int threads = 1;
};

// Counts sites of `field` with local time >= census_level(mode, n, t) for each
// threshold t; in exit mode only sites inside D(0,n) take part. n <= 1 gives
// empty counts.
std::vector<std::uint64_t> census_counts(const walk::LocalTimeField& field, Mode mode, double n,
                                         const std::vector<double>& thresholds);

// Local-time field of one replica: times 0..n (fixed) or 0..T_exit (exit).
walk::LocalTimeField census_field(const walk::JumpLaw& law, Mode mode, double n, std::uint64_t seed,
                                  std::uint64_t replica, std::uint64_t max_steps = std::uint64_t{1} << 36);

// One result per (replica, threshold), replica-major. Throws ConfigInvalid
// for thresholds outside (0,1) (fixed) or (0,2) (exit); MaxStepsExceeded
// propagates.
std::vector<CensusResult> run_census(const walk::JumpLaw& law, const CensusConfig& cfg);

struct ExponentFit {
  double a = 0.0;
  std::vector<double> radii;
  std::vector<double> mean_counts;
  std::vector<std::uint64_t> zero_replicas;  // per radius
  double slope = 0.0;  // least squares of log mean count on log radius; NaN if a mean is 0
  double intercept = 0.0;
};

// Psi-count exponents for each a, all from the same exit paths.
std::vector<ExponentFit> psi_exponent(const walk::JumpLaw& law, const std::vector<double>& radii,
                                      const std::vector<double>& a_values, std::uint64_t replicas,
                                      std::uint64_t seed, int threads = 1);

struct RatioSeries {
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::vector<double>> ratios;  // [replica][checkpoint], L*_n/(log n)^2
  std::vector<double> median, q1, q3;
};

// One walk per replica read at every checkpoint. Throws ConfigInvalid unless
// checkpoints are increasing and >= 2.
RatioSeries et_ratio_series(const walk::JumpLaw& law, const std::vector<std::uint64_t>& checkpoints,
                            std::uint64_t replicas, std::uint64_t seed, int threads = 1);

struct TimeExponent {
  double radius = 0.0;
  std::vector<double> exponents;  // log T / log n per replica
  double median = 0.0;
};

// Throws ConfigInvalid for radii below 10; MaxStepsExceeded propagates.
std::vector<TimeExponent> time_exponent(const walk::JumpLaw& law, const std::vector<double>& radii,
                                        std::uint64_t replicas, std::uint64_t seed, int threads = 1,
                                        std::uint64_t max_steps = std::uint64_t{1} << 36);

struct Equivalence {
  double radius = 0.0;
  double a = 0.0;
  std::uint64_t exit_time = 0;
  std::uint64_t psi = 0;          // exit census at a
  double alpha_matched = 0.0;     // 2a (log n / log T)^2: same level as psi
  std::uint64_t theta_matched = 0;
  std::uint64_t theta_half = 0;   // fixed census at time T with alpha = a/2
};

// Both censuses on one exit path.
Equivalence census_equivalence(const walk::JumpLaw& law, double radius, double a, std::uint64_t seed,
                               std::uint64_t replica = 0);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

}  // namespace lwb::census
