#include "lwb/census/census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lwb/error.hpp"
#include "lwb/harness/parallel.hpp"
#include "lwb/walk/alias_table.hpp"
#include "lwb/walk/rng.hpp"

namespace lwb::census {

namespace {

std::string stream_name(Mode mode, double n) {
  return std::string(mode == Mode::ExitDisk ? "census-exit-" : "census-time-") + std::to_string(std::llround(n));
}

void check_thresholds(Mode mode, const std::vector<double>& ts) {
  const double top = mode == Mode::ExitDisk ? 2.0 : 1.0;
  for (double t : ts)
    if (!(t > 0.0 && t < top)) throw Error(ErrorCode::ConfigInvalid, "census threshold out of range");
}

}  // namespace

double census_level(Mode mode, double n, double threshold) {
  const double l = std::log(n);
  return threshold * (mode == Mode::ExitDisk ? 2.0 : 1.0) / std::numbers::pi * l * l;
}

std::vector<std::uint64_t> census_counts(const walk::LocalTimeField& field, Mode mode, double n,
                                         const std::vector<double>& thresholds) {
  std::vector<std::uint64_t> out(thresholds.size(), 0);
  if (n <= 1.0) return out;
  std::vector<double> levels;
  for (double t : thresholds) levels.push_back(census_level(mode, n, t));
  const walk::Disk d{{0, 0}, n};
  for (const auto& [x, c] : field.counts()) {
    if (mode == Mode::ExitDisk && !d.contains(x)) continue;
    for (std::size_t j = 0; j < levels.size(); ++j) out[j] += static_cast<double>(c) >= levels[j];
  }
  return out;
}

walk::LocalTimeField census_field(const walk::JumpLaw& law, Mode mode, double n, std::uint64_t seed,
                                  std::uint64_t replica, std::uint64_t max_steps) {
  const walk::StepSampler sampler(law);
  walk::Stream rng(seed, replica, stream_name(mode, n));
  if (mode == Mode::ExitDisk) {
    walk::RunOptions opts;
    opts.record_local_time = true;
    opts.max_steps = max_steps;
    return std::move(*walk::run_until_exit({0, 0}, walk::Disk{{0, 0}, n}, sampler, rng, opts).local_time);
  }
  if (n < 0.0) throw Error(ErrorCode::ConfigInvalid, "negative step count");
  const auto steps = static_cast<std::uint64_t>(n);
  walk::LocalTimeField f;
  Point x{};
  f.visit(x);
  for (std::uint64_t t = 0; t < steps; ++t) {
    x = x + sampler.sample(rng);
    f.visit(x);
  }
  f.total_steps = steps;
  return f;
}

std::vector<CensusResult> run_census(const walk::JumpLaw& law, const CensusConfig& cfg) {
  check_thresholds(cfg.mode, cfg.thresholds);
  const auto k = cfg.thresholds.size();
  std::vector<CensusResult> out(cfg.replicas * k);
  parallel_for(cfg.replicas, cfg.threads, [&](std::uint64_t i) {
    const auto f = census_field(law, cfg.mode, cfg.n, cfg.seed, i, cfg.max_steps);
    const auto counts = census_counts(f, cfg.mode, cfg.n, cfg.thresholds);
    for (std::size_t j = 0; j < k; ++j) {
      auto& r = out[i * k + j];
      r.mode = cfg.mode;
      r.n = cfg.n;
      r.threshold = cfg.thresholds[j];
      r.count = counts[j];
      r.l_star = f.max();
      r.top_site = f.argmax();
      r.distinct_sites = f.distinct_sites();
      r.steps = f.total_steps;
      r.seed = cfg.seed;
      r.replica = i;
    }
  });
  return out;
}

std::vector<ExponentFit> psi_exponent(const walk::JumpLaw& law, const std::vector<double>& radii,
                                      const std::vector<double>& a_values, std::uint64_t replicas,
                                      std::uint64_t seed, int threads) {
  if (radii.size() < 2) throw Error(ErrorCode::ConfigInvalid, "need at least two radii");
  check_thresholds(Mode::ExitDisk, a_values);
  std::vector<ExponentFit> fits(a_values.size());
  for (std::size_t j = 0; j < a_values.size(); ++j) {
    fits[j].a = a_values[j];
    fits[j].radii = radii;
    fits[j].mean_counts.assign(radii.size(), 0.0);
    fits[j].zero_replicas.assign(radii.size(), 0);
  }
  for (std::size_t r = 0; r < radii.size(); ++r) {
    std::vector<std::vector<std::uint64_t>> counts(replicas);
    parallel_for(replicas, threads, [&](std::uint64_t i) {
      counts[i] = census_counts(census_field(law, Mode::ExitDisk, radii[r], seed, i), Mode::ExitDisk, radii[r],
                                a_values);
    });
    for (std::size_t j = 0; j < a_values.size(); ++j) {
      double s = 0.0;
      for (const auto& c : counts) {
        s += static_cast<double>(c[j]);
        fits[j].zero_replicas[r] += c[j] == 0;
      }
      fits[j].mean_counts[r] = s / static_cast<double>(replicas);
    }
  }
  for (auto& f : fits) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool zero = false;
    const double m = static_cast<double>(radii.size());
    for (std::size_t r = 0; r < radii.size(); ++r) {
      if (f.mean_counts[r] <= 0.0) zero = true;
      const double x = std::log(radii[r]), y = std::log(f.mean_counts[r]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    if (zero) {
      f.slope = f.intercept = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / m;
  }
  return fits;
}

RatioSeries et_ratio_series(const walk::JumpLaw& law, const std::vector<std::uint64_t>& checkpoints,
                            std::uint64_t replicas, std::uint64_t seed, int threads) {
  if (checkpoints.empty() || checkpoints.front() < 2)
    throw Error(ErrorCode::ConfigInvalid, "checkpoints must be at least 2");
  for (std::size_t j = 1; j < checkpoints.size(); ++j)
    if (checkpoints[j] <= checkpoints[j - 1]) throw Error(ErrorCode::ConfigInvalid, "checkpoints must increase");
  RatioSeries s;
  s.checkpoints = checkpoints;
  s.ratios.assign(replicas, std::vector<double>(checkpoints.size()));
  const walk::StepSampler sampler(law);
  parallel_for(replicas, threads, [&](std::uint64_t i) {
    walk::Stream rng(seed, i, "etratio");
    walk::LocalTimeField f;
    Point x{};
    f.visit(x);
    std::uint64_t t = 0;
    for (std::size_t j = 0; j < checkpoints.size(); ++j) {
      for (; t < checkpoints[j]; ++t) {
        x = x + sampler.sample(rng);
        f.visit(x);
      }
      const double l = std::log(static_cast<double>(checkpoints[j]));
      s.ratios[i][j] = static_cast<double>(f.max()) / (l * l);
    }
  });
  for (std::size_t j = 0; j < checkpoints.size(); ++j) {
    std::vector<double> col;
    for (const auto& r : s.ratios) col.push_back(r[j]);
    s.median.push_back(quantile(col, 0.5));
    s.q1.push_back(quantile(col, 0.25));
    s.q3.push_back(quantile(col, 0.75));
  }
  return s;
}

std::vector<TimeExponent> time_exponent(const walk::JumpLaw& law, const std::vector<double>& radii,
                                        std::uint64_t replicas, std::uint64_t seed, int threads,
                                        std::uint64_t max_steps) {
  for (double r : radii)
    if (r < 10.0) throw Error(ErrorCode::ConfigInvalid, "radii must be at least 10");
  const walk::StepSampler sampler(law);
  std::vector<TimeExponent> out;
  for (double r : radii) {
    TimeExponent te;
    te.radius = r;
    te.exponents.assign(replicas, 0.0);
    parallel_for(replicas, threads, [&](std::uint64_t i) {
      walk::Stream rng(seed, i, "time-exponent-" + std::to_string(std::llround(r)));
      walk::RunOptions opts;
      opts.max_steps = max_steps;
      const auto res = walk::run_until_exit({0, 0}, walk::Disk{{0, 0}, r}, sampler, rng, opts);
      te.exponents[i] = std::log(static_cast<double>(res.exit_time)) / std::log(r);
    });
    te.median = median(te.exponents);
    out.push_back(std::move(te));
  }
  return out;
}

Equivalence census_equivalence(const walk::JumpLaw& law, double radius, double a, std::uint64_t seed,
                               std::uint64_t replica) {
  check_thresholds(Mode::ExitDisk, {a});
  const auto f = census_field(law, Mode::ExitDisk, radius, seed, replica);
  Equivalence e;
  e.radius = radius;
  e.a = a;
  e.exit_time = f.total_steps;
  e.psi = census_counts(f, Mode::ExitDisk, radius, {a})[0];
  const double T = static_cast<double>(f.total_steps);
  const double ratio = std::log(radius) / std::log(T);
  e.alpha_matched = 2.0 * a * ratio * ratio;
  // the matched alpha may exceed 1 for short paths; the count is still defined
  const double lvl = census_level(Mode::FixedTime, T, e.alpha_matched);
  for (const auto& [x, c] : f.counts()) e.theta_matched += static_cast<double>(c) >= lvl;
  e.theta_half = census_counts(f, Mode::FixedTime, T, {a / 2.0})[0];
  return e;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw Error(ErrorCode::InsufficientSamples, "empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace lwb::census
