#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lwb/potential/solver.hpp"
#include "lwb/walk/alias_table.hpp"
#include "lwb/walk/jump_law.hpp"
#include "lwb/walk/lattice.hpp"
#include "lwb/walk/rng.hpp"

namespace lwb::excursion {

using walk::Point;

// Nested disks D(center, r_k), r_0 > r_1 > ... > r_n, each with the outer band
// r_k <= |y - center| <= r_k + band. The walk is killed on leaving
// D(kill_center, kill_radius).
struct RadiiLadder {
  std::vector<double> levels;
  double band = 2.0;
  Point center{};
  Point kill_center{};
  double kill_radius = 0.0;
  std::string preset;

  int n() const { return static_cast<int>(levels.size()) - 1; }
  double outer(int k) const { return levels[static_cast<std::size_t>(k)] + band; }
};

// Throws LadderInvalid.
void validate(const RadiiLadder& ladder);

// r_k = r0 * lambda^-k, k = 0..n. kill_radius <= 0 gives 2 r0. For a
// finite-range law a band of at least its range rules out skips.
RadiiLadder geometric_ladder(double r0, double lambda, int n, double band = 2.0, Point center = {},
                             double kill_radius = 0.0);

// r_{n,k} = e^n n^{3(n-k)}, band n^4, killed outside D(0, 16 r_{n,0}).
// center defaults to the middle of [2 r_{n,0}, 3 r_{n,0}]^2.
RadiiLadder cubic_ladder(int n);
RadiiLadder cubic_ladder(int n, Point center);

enum class Outcome { Inward, Outward, Skip, Killed, Open };

enum class SkipKind {
  Deep,    // landed at the adjacent level but off its band
  Beyond,  // landed past the adjacent level
};

// One stay at a level: from the step that reached it to the step that left it.
struct Event {
  int level = 0;
  std::uint64_t t_in = 0;
  Point x_in{};
  std::uint64_t t_out = 0;
  Outcome outcome = Outcome::Open;
};

struct SkipEvent {
  std::uint64_t time = 0;
  int from = 0;  // -1 before the trace opened
  int to = 0;
  SkipKind kind = SkipKind::Deep;
};

struct ExcursionTrace {
  std::vector<Event> events;
  std::vector<std::uint64_t> counts;  // counts[k] = N_k for k = 1..n; counts[0] = 1 once opened
  std::vector<SkipEvent> skips;
  bool opened = false;
  bool complete = false;  // the walk left the kill disk
  std::uint64_t steps = 0;

  // N_k rebuilt from the level sequence of the events alone.
  std::vector<std::uint64_t> recount() const;
};

// Streaming decomposition, O(1) state per step.
//
// Level semantics: at level b the walk is inside D(r_{b-1}) (no constraint
// for b = 0) and outside D(r'_{b+1}). Entering D(r'_{b+1}) moves it inward to
// the deepest level whose open disk D(r'_j) contains the landing point;
// leaving D(r_{b-1}) moves it outward to the first level j with |y| >= r_j.
// A move is clean only when it reaches the adjacent level inside its band.
// N_k counts moves from a level <= k-1 to a level >= k, which is the number
// of excursions from D(r_{k-1})^c to D(r'_k).
class ExcursionTracker {
 public:
  explicit ExcursionTracker(RadiiLadder ladder);

  // Feeds X_t for t = 0, 1, ...; returns false once the walk is killed.
  bool step(Point x);
  const ExcursionTrace& trace() const { return trace_; }
  ExcursionTrace take();

 private:
  double dist2(Point x) const;
  void enter(int level, Point x, int from, bool clean, bool deep);

  RadiiLadder ladder_;
  std::vector<double> in2_;   // r_k^2
  std::vector<double> out2_;  // (r_k + band)^2
  double kill2_;
  ExcursionTrace trace_;
  int level_ = -1;
  std::uint64_t t_ = 0;
  bool started_ = false;
  bool was_outside_ = false;
};

// Throws LadderInvalid.
ExcursionTrace decompose(const std::vector<Point>& path, const RadiiLadder& ladder);

// Runs a walk from `start` until it leaves the kill disk. Throws
// MaxStepsExceeded.
ExcursionTrace trace_walk(const walk::StepSampler& sampler, const RadiiLadder& ladder, Point start,
                          walk::Stream& rng, std::uint64_t max_steps = std::uint64_t{1} << 36);

// Default start: the band-0 point on the positive x axis of the center.
Point band_start(const RadiiLadder& ladder, int level = 0);

struct SuccessPredicate {
  double a = 1.0;
  int n = 0;

  double target(int k) const;  // 3 a k^2 log k
  int k0() const;              // 4 v inf{k : target(k) >= 2k}
};

SuccessPredicate success_predicate(double a, int n);

struct SuccessVerdict {
  bool success = false;
  bool no_skips = false;
  std::vector<bool> level_ok;  // index k = 1..n
};

// Throws TraceIncomplete when the walk was not run to the kill time.
SuccessVerdict is_n_successful(const ExcursionTrace& trace, const SuccessPredicate& pred);

struct LevelCrossing {
  int level = 0;
  Point start{};
  double up = 0.0;  // reaches the band of level k+1 first
  double down = 0.0;  // reaches the band of level k-1 (or is killed, k = 0) first
  double skip = 0.0;
  double up_min = 0.0, up_max = 0.0;  // over the band of level k
  double skip_max = 0.0;
  double partition_error = 0.0;  // max |up + down + skip - 1| over the region
  std::size_t states = 0;
};

// Exact one-level transition probabilities from each band, by three solves
// on the region of that level. An empty `which` means every level.
std::vector<LevelCrossing> crossing_probability_matrix(const walk::JumpLaw& law, const RadiiLadder& ladder,
                                                       const std::vector<int>& which = {},
                                                       const potential::SolverOptions& opts = {});

struct ReplicaCounts {
  std::vector<std::uint64_t> counts;
  bool skipped = false;
  bool success = false;
};

struct ExcursionSample {
  std::vector<ReplicaCounts> replicas;
  double success_rate = 0.0;
  double skip_rate = 0.0;
  std::vector<double> mean_counts;  // index k
};

ExcursionSample simulate_excursions(const walk::JumpLaw& law, const RadiiLadder& ladder, Point start,
                                    std::uint64_t replicas, std::uint64_t seed, const SuccessPredicate& pred);

struct AdditivityRow {
  std::uint64_t m = 0;
  std::uint64_t samples = 0;
  double mean = 0.0;
  double se = 0.0;
};

struct AdditivityReport {
  int level = 1;
  std::vector<AdditivityRow> rows;  // E[N_{level+1} | N_level = m], m >= 1
  double slope = 0.0;  // weighted least squares on the row means
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Rows with fewer than min_samples replicas are dropped.
AdditivityReport conditional_additivity(const ExcursionSample& s, int level, std::uint64_t min_samples = 30);

enum class Environment {
  ExitSide,     // exit point on the entry side (cos >= 0) vs the far side
  EntryPoint,   // start on the axis vs on the diagonal, alternating replicas
  RandomSplit,  // labels independent of the path
};

struct DecouplingOptions {
  int level = 1;
  std::uint64_t replicas = 10000;
  std::uint64_t seed = 1;
  int resamples = 200;
  Environment environment = Environment::ExitSide;
};

struct DecouplingReport {
  int level = 1;
  std::uint64_t used = 0;
  std::uint64_t skipped = 0;
  std::uint64_t class_size[2] = {0, 0};
  std::vector<double> pmf[2];  // law of the inner count per class
  double tv = 0.0;
  double tv_null = 0.0;  // mean TV after permuting the labels
  double tv_se = 0.0;    // bootstrap standard error of tv
};

// One excursion from the band of `level` until the exit of D(r_{level-1}),
// counting entries into D(r'_{level+1}). Excursions with a skip among the
// three levels are dropped. Throws InsufficientSamples below 1000 replicas or
// when a class is empty.
DecouplingReport decoupling_diagnostic(const walk::JumpLaw& law, const RadiiLadder& ladder,
                                       const DecouplingOptions& opts);

}  // namespace lwb::excursion
