#include "lwb/excursion/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lwb/error.hpp"
#include "lwb/potential/domain.hpp"

namespace lwb::excursion {

namespace {

constexpr double kCoordLimit = 1073741824.0;  // 2^30

double d2(Point a, Point b) { return static_cast<double>(walk::norm2(a - b)); }

}  // namespace

void validate(const RadiiLadder& l) {
  if (l.levels.empty()) throw Error(ErrorCode::LadderInvalid, "ladder needs at least one level");
  if (!(l.band >= 1.0) || !std::isfinite(l.band)) throw Error(ErrorCode::LadderInvalid, "band width must be at least 1");
  for (std::size_t k = 0; k < l.levels.size(); ++k) {
    const double r = l.levels[k];
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::LadderInvalid, "radii must be positive and finite");
    if (k > 0 && !(r + l.band < l.levels[k - 1]))
      throw Error(ErrorCode::LadderInvalid, "radii must decrease with disjoint bands");
  }
  if (!(walk::norm(l.center - l.kill_center) + l.outer(0) < l.kill_radius))
    throw Error(ErrorCode::LadderInvalid, "kill disk must contain D(center, r_0 + band)");
  const double reach = std::max({std::abs(static_cast<double>(l.kill_center.x)), std::abs(static_cast<double>(l.kill_center.y)),
                                 std::abs(static_cast<double>(l.center.x)), std::abs(static_cast<double>(l.center.y))}) +
                       l.kill_radius;
  if (reach > kCoordLimit) throw Error(ErrorCode::LadderInvalid, "ladder not representable on the lattice");
}

RadiiLadder geometric_ladder(double r0, double lambda, int n, double band, Point center, double kill_radius) {
  if (n < 0 || !(lambda > 1.0)) throw Error(ErrorCode::LadderInvalid, "geometric ladder needs n >= 0 and lambda > 1");
  RadiiLadder l;
  for (int k = 0; k <= n; ++k) l.levels.push_back(r0 * std::pow(lambda, -k));
  l.band = band;
  l.center = center;
  l.kill_center = center;
  l.kill_radius = kill_radius > 0.0 ? kill_radius : 2.0 * r0;
  l.preset = "geometric";
  validate(l);
  return l;
}

RadiiLadder cubic_ladder(int n) {
  if (n < 2) throw Error(ErrorCode::LadderInvalid, "cubic ladder needs n >= 2");
  const double r0 = std::exp(n + 3.0 * n * std::log(n));
  if (!(20.0 * r0 < kCoordLimit)) throw Error(ErrorCode::LadderInvalid, "cubic ladder not representable for this n");
  const auto c = static_cast<std::int64_t>(std::llround(2.5 * r0));
  return cubic_ladder(n, {c, c});
}

RadiiLadder cubic_ladder(int n, Point center) {
  if (n < 2) throw Error(ErrorCode::LadderInvalid, "cubic ladder needs n >= 2");
  RadiiLadder l;
  for (int k = 0; k <= n; ++k) l.levels.push_back(std::exp(n + 3.0 * (n - k) * std::log(n)));
  const double r0 = l.levels[0];
  if (!(20.0 * r0 < kCoordLimit)) throw Error(ErrorCode::LadderInvalid, "cubic ladder not representable for this n");
  for (auto v : {center.x, center.y})
    if (static_cast<double>(v) < 2.0 * r0 || static_cast<double>(v) > 3.0 * r0)
      throw Error(ErrorCode::LadderInvalid, "center must lie in [2 r_0, 3 r_0]^2");
  l.band = std::pow(n, 4);
  l.center = center;
  l.kill_center = {0, 0};
  l.kill_radius = 16.0 * r0;
  l.preset = "cubic";
  validate(l);
  return l;
}

Point band_start(const RadiiLadder& l, int level) {
  if (level < 0 || level > l.n()) throw Error(ErrorCode::ConfigInvalid, "level out of range");
  const auto r = static_cast<std::int64_t>(std::llround(l.levels[static_cast<std::size_t>(level)] + l.band / 2.0));
  return l.center + Point{r, 0};
}

// ---- trace ------------------------------------------------------------------

std::vector<std::uint64_t> ExcursionTrace::recount() const {
  std::vector<std::uint64_t> c(counts.size(), 0);
  int prev = -1;
  for (const auto& e : events) {
    for (int k = prev + 1; k <= e.level; ++k) ++c[static_cast<std::size_t>(k)];
    prev = e.level;
  }
  return c;
}

ExcursionTracker::ExcursionTracker(RadiiLadder ladder) : ladder_(std::move(ladder)) {
  validate(ladder_);
  for (int k = 0; k <= ladder_.n(); ++k) {
    const double r = ladder_.levels[static_cast<std::size_t>(k)];
    in2_.push_back(r * r);
    out2_.push_back(ladder_.outer(k) * ladder_.outer(k));
  }
  kill2_ = ladder_.kill_radius * ladder_.kill_radius;
  trace_.counts.assign(static_cast<std::size_t>(ladder_.n() + 1), 0);
}

double ExcursionTracker::dist2(Point x) const { return d2(x, ladder_.center); }

void ExcursionTracker::enter(int level, Point x, int from, bool clean, bool deep) {
  if (!trace_.events.empty()) {
    auto& e = trace_.events.back();
    e.t_out = t_;
    e.outcome = !clean ? Outcome::Skip : (level > from ? Outcome::Inward : Outcome::Outward);
  }
  for (int k = from + 1; k <= level; ++k) ++trace_.counts[static_cast<std::size_t>(k)];
  trace_.events.push_back({level, t_, x, t_, Outcome::Open});
  if (!clean) trace_.skips.push_back({t_, from, level, deep ? SkipKind::Deep : SkipKind::Beyond});
  level_ = level;
}

bool ExcursionTracker::step(Point x) {
  if (trace_.complete) return false;
  const double q = dist2(x);
  const int n = ladder_.n();
  if (!started_) {
    started_ = true;
    was_outside_ = q >= out2_[0];
  } else {
    ++t_;
  }
  if (level_ < 0) {
    if (q < out2_[0]) {
      if (was_outside_) {
        int j = 0;
        while (j < n && q < out2_[static_cast<std::size_t>(j + 1)]) ++j;
        const bool clean = j == 0 && q >= in2_[0];
        trace_.opened = true;
        enter(j, x, -1, clean, j == 0 && !clean);
      } else if (q >= in2_[0]) {
        trace_.opened = true;
        enter(0, x, -1, true, false);
      }
    } else {
      was_outside_ = true;
    }
  } else {
    const int b = level_;
    if (b < n && q < out2_[static_cast<std::size_t>(b + 1)]) {
      int j = b + 1;
      while (j < n && q < out2_[static_cast<std::size_t>(j + 1)]) ++j;
      const bool clean = j == b + 1 && q >= in2_[static_cast<std::size_t>(j)];
      enter(j, x, b, clean, j == b + 1 && !clean);
    } else if (b >= 1 && q >= in2_[static_cast<std::size_t>(b - 1)]) {
      int j = b - 1;
      while (j > 0 && q >= in2_[static_cast<std::size_t>(j - 1)]) --j;
      const bool clean = j == b - 1 && q <= out2_[static_cast<std::size_t>(j)];
      enter(j, x, b, clean, j == b - 1 && !clean);
    }
  }
  if (d2(x, ladder_.kill_center) >= kill2_) {
    if (!trace_.events.empty()) {
      trace_.events.back().t_out = t_;
      trace_.events.back().outcome = Outcome::Killed;
    }
    trace_.complete = true;
    trace_.steps = t_;
    return false;
  }
  trace_.steps = t_;
  return true;
}

ExcursionTrace ExcursionTracker::take() { return std::move(trace_); }

ExcursionTrace decompose(const std::vector<Point>& path, const RadiiLadder& ladder) {
  ExcursionTracker tr(ladder);
  for (const auto& x : path)
    if (!tr.step(x)) break;
  auto t = tr.take();
  if (!t.complete && !t.events.empty()) t.events.back().t_out = t.steps;
  return t;
}

ExcursionTrace trace_walk(const walk::StepSampler& sampler, const RadiiLadder& ladder, Point start, walk::Stream& rng,
                          std::uint64_t max_steps) {
  ExcursionTracker tr(ladder);
  Point x = start;
  std::uint64_t steps = 0;
  while (tr.step(x)) {
    if (++steps > max_steps) throw Error(ErrorCode::MaxStepsExceeded, "walk did not leave the kill disk");
    x = x + sampler.sample(rng);
  }
  return tr.take();
}

// ---- success predicate ------------------------------------------------------

double SuccessPredicate::target(int k) const { return 3.0 * a * k * k * std::log(static_cast<double>(k)); }

int SuccessPredicate::k0() const {
  int k = 1;
  while (target(k) < 2.0 * k) ++k;
  return std::max(4, k);
}

SuccessPredicate success_predicate(double a, int n) {
  if (!(a > 0.0 && a < 2.0)) throw Error(ErrorCode::ConfigInvalid, "a must lie in (0, 2)");
  if (n < 1) throw Error(ErrorCode::ConfigInvalid, "n must be at least 1");
  return {a, n};
}

SuccessVerdict is_n_successful(const ExcursionTrace& trace, const SuccessPredicate& pred) {
  if (!trace.complete) throw Error(ErrorCode::TraceIncomplete, "trace was not run to the kill time");
  if (static_cast<int>(trace.counts.size()) != pred.n + 1)
    throw Error(ErrorCode::ConfigInvalid, "predicate and trace disagree on the number of levels");
  SuccessVerdict v;
  v.no_skips = trace.skips.empty();
  v.level_ok.assign(static_cast<std::size_t>(pred.n + 1), true);
  const int k0 = pred.k0();
  bool all = v.no_skips;
  for (int k = 1; k <= pred.n; ++k) {
    const auto m = static_cast<double>(trace.counts[static_cast<std::size_t>(k)]);
    const bool ok = k < k0 ? m == 1.0 : (m >= pred.target(k) - k && m <= pred.target(k) + k);
    v.level_ok[static_cast<std::size_t>(k)] = ok;
    all = all && ok;
  }
  v.success = all;
  return v;
}

// ---- exact crossing probabilities -------------------------------------------

std::vector<LevelCrossing> crossing_probability_matrix(const walk::JumpLaw& law, const RadiiLadder& l,
                                                       const std::vector<int>& which,
                                                       const potential::SolverOptions& opts) {
  validate(l);
  const int n = l.n();
  if (n < 1) throw Error(ErrorCode::LadderInvalid, "crossing probabilities need at least two levels");
  std::vector<int> levels = which;
  if (levels.empty())
    for (int k = 0; k <= n; ++k) levels.push_back(k);
  std::vector<LevelCrossing> out;
  const double kill2 = l.kill_radius * l.kill_radius;
  for (int k : levels) {
    if (k < 0 || k > n) throw Error(ErrorCode::ConfigInvalid, "level out of range");
    const auto K = static_cast<std::size_t>(k);
    const double up_in = k < n ? l.levels[K + 1] * l.levels[K + 1] : 0.0;
    const double up_out = k < n ? l.outer(k + 1) * l.outer(k + 1) : 0.0;
    const double dn_in = k > 0 ? l.levels[K - 1] * l.levels[K - 1] : 0.0;
    const double dn_out = k > 0 ? l.outer(k - 1) * l.outer(k - 1) : 0.0;

    std::vector<Point> pts;
    if (k == 0) {
      for (const auto& p : walk::annulus_points(l.kill_center, 0.0, l.kill_radius))
        if (d2(p, l.center) >= up_out) pts.push_back(p);
    } else {
      pts = walk::annulus_points(l.center, k < n ? l.outer(k + 1) : 0.0, l.levels[K - 1]);
    }
    potential::DomainSolver s(law, potential::Domain(std::move(pts)), opts);
    const auto m = static_cast<Eigen::Index>(s.size());
    Eigen::VectorXd up = Eigen::VectorXd::Zero(m), dn = Eigen::VectorXd::Zero(m), sk = Eigen::VectorXd::Zero(m);

    if (law.finite_range()) {
      for (Eigen::Index i = 0; i < m; ++i) {
        const Point x = s.domain()[static_cast<std::size_t>(i)];
        for (const auto& e : law.core()) {
          const Point z = x + e.offset;
          if (s.domain().contains(z)) continue;
          const double q = d2(z, l.center);
          if (k < n && q < up_out && q >= up_in)
            up[i] += e.p;
          else if (k > 0 ? (q >= dn_in && q <= dn_out) : d2(z, l.kill_center) >= kill2)
            dn[i] += e.p;
          else
            sk[i] += e.p;
        }
      }
    } else {
      if (k < n) up = s.step_mass_into(potential::Domain::annulus(l.center, l.levels[K + 1], l.outer(k + 1)));
      if (k > 0) {
        dn = s.step_mass_into(potential::Domain::annulus(l.center, l.levels[K - 1], l.outer(k - 1) + 1e-9));
      } else {
        dn = (s.exit_mass() - s.step_mass_into(potential::Domain::disk({l.center, l.outer(1)}))).cwiseMax(0.0);
      }
      sk = (s.exit_mass() - up - dn).cwiseMax(0.0);
    }

    LevelCrossing c;
    c.level = k;
    c.start = band_start(l, k);
    c.states = s.size();
    const Eigen::VectorXd u = up.any() ? s.solve(up) : Eigen::VectorXd::Zero(m);
    const Eigen::VectorXd d = dn.any() ? s.solve(dn) : Eigen::VectorXd::Zero(m);
    const Eigen::VectorXd w = sk.maxCoeff() > 0.0 ? s.solve(sk) : Eigen::VectorXd::Zero(m);
    const auto si = s.domain().index(c.start);
    if (si < 0) throw Error(ErrorCode::LadderInvalid, "band start point outside the level region");
    c.up = u[si];
    c.down = d[si];
    c.skip = w[si];
    c.partition_error = ((u + d + w).array() - 1.0).abs().maxCoeff();
    c.up_min = 1.0;
    c.up_max = 0.0;
    const double b_in = l.levels[K] * l.levels[K], b_out = l.outer(k) * l.outer(k);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double q = d2(s.domain()[static_cast<std::size_t>(i)], l.center);
      if (q < b_in || q > b_out) continue;
      c.up_min = std::min(c.up_min, u[i]);
      c.up_max = std::max(c.up_max, u[i]);
      c.skip_max = std::max(c.skip_max, w[i]);
    }
    out.push_back(c);
  }
  return out;
}

// ---- Monte Carlo ------------------------------------------------------------

ExcursionSample simulate_excursions(const walk::JumpLaw& law, const RadiiLadder& ladder, Point start,
                                    std::uint64_t replicas, std::uint64_t seed, const SuccessPredicate& pred) {
  const walk::StepSampler sampler(law);
  ExcursionSample out;
  out.mean_counts.assign(static_cast<std::size_t>(ladder.n() + 1), 0.0);
  double succ = 0.0, skip = 0.0;
  for (std::uint64_t i = 0; i < replicas; ++i) {
    walk::Stream rng(seed, i, "excursions");
    const auto t = trace_walk(sampler, ladder, start, rng);
    ReplicaCounts r{t.counts, !t.skips.empty(), is_n_successful(t, pred).success};
    for (std::size_t k = 0; k < r.counts.size(); ++k) out.mean_counts[k] += static_cast<double>(r.counts[k]);
    succ += r.success;
    skip += r.skipped;
    out.replicas.push_back(std::move(r));
  }
  const double N = static_cast<double>(std::max<std::uint64_t>(replicas, 1));
  for (auto& v : out.mean_counts) v /= N;
  out.success_rate = succ / N;
  out.skip_rate = skip / N;
  return out;
}

AdditivityReport conditional_additivity(const ExcursionSample& s, int level, std::uint64_t min_samples) {
  if (s.replicas.empty() || level < 1 || level + 1 >= static_cast<int>(s.replicas.front().counts.size()))
    throw Error(ErrorCode::ConfigInvalid, "additivity needs levels k and k+1");
  AdditivityReport rep;
  rep.level = level;
  std::vector<double> sum, sum2, cnt;
  for (const auto& r : s.replicas) {
    const auto m = r.counts[static_cast<std::size_t>(level)];
    if (m == 0) continue;
    if (m >= cnt.size()) {
      cnt.resize(m + 1, 0.0);
      sum.resize(m + 1, 0.0);
      sum2.resize(m + 1, 0.0);
    }
    const auto v = static_cast<double>(r.counts[static_cast<std::size_t>(level + 1)]);
    cnt[m] += 1.0;
    sum[m] += v;
    sum2[m] += v * v;
  }
  for (std::size_t m = 1; m < cnt.size(); ++m) {
    if (cnt[m] < static_cast<double>(min_samples)) continue;
    const double mean = sum[m] / cnt[m];
    const double var = std::max(0.0, sum2[m] / cnt[m] - mean * mean) * cnt[m] / (cnt[m] - 1.0);
    rep.rows.push_back({m, static_cast<std::uint64_t>(cnt[m]), mean, std::sqrt(var / cnt[m])});
  }
  if (rep.rows.size() < 2) throw Error(ErrorCode::InsufficientSamples, "need two populated values of N_k");
  double W = 0, sx = 0, sy = 0;
  for (const auto& r : rep.rows) {
    const double w = static_cast<double>(r.samples);
    W += w;
    sx += w * static_cast<double>(r.m);
    sy += w * r.mean;
  }
  const double mx = sx / W, my = sy / W;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& r : rep.rows) {
    const double w = static_cast<double>(r.samples), dx = static_cast<double>(r.m) - mx, dy = r.mean - my;
    sxx += w * dx * dx;
    sxy += w * dx * dy;
    syy += w * dy * dy;
  }
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  rep.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return rep;
}

namespace {

double tv_distance(const std::vector<std::uint64_t>& v, const std::vector<std::uint8_t>& label, std::size_t support,
                   const std::vector<std::size_t>* pick0 = nullptr, const std::vector<std::size_t>* pick1 = nullptr) {
  std::vector<double> h0(support, 0.0), h1(support, 0.0);
  double n0 = 0, n1 = 0;
  if (pick0) {
    for (auto i : *pick0) h0[v[i]] += 1.0;
    for (auto i : *pick1) h1[v[i]] += 1.0;
    n0 = static_cast<double>(pick0->size());
    n1 = static_cast<double>(pick1->size());
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) {
      (label[i] ? h1 : h0)[v[i]] += 1.0;
      (label[i] ? n1 : n0) += 1.0;
    }
  }
  double tv = 0.0;
  for (std::size_t j = 0; j < support; ++j) tv += std::abs(h0[j] / n0 - h1[j] / n1);
  return 0.5 * tv;
}

}  // namespace

DecouplingReport decoupling_diagnostic(const walk::JumpLaw& law, const RadiiLadder& l, const DecouplingOptions& opts) {
  validate(l);
  const int lev = opts.level;
  if (lev < 1 || lev + 1 > l.n()) throw Error(ErrorCode::ConfigInvalid, "decoupling level needs levels l-1 and l+1");
  if (opts.replicas < 1000) throw Error(ErrorCode::InsufficientSamples, "decoupling needs at least 1000 replicas");
  const auto L = static_cast<std::size_t>(lev);
  const double exit2 = l.levels[L - 1] * l.levels[L - 1], exit_band2 = l.outer(lev - 1) * l.outer(lev - 1);
  const double arm2 = l.levels[L] * l.levels[L], arm_band2 = l.outer(lev) * l.outer(lev);
  const double in2 = l.levels[L + 1] * l.levels[L + 1], in_band2 = l.outer(lev + 1) * l.outer(lev + 1);
  const Point z_axis = band_start(l, lev);
  const auto diag = static_cast<std::int64_t>(std::llround((l.levels[L] + l.band / 2.0) / std::sqrt(2.0)));
  const Point z_diag = l.center + Point{diag, diag};
  if (d2(z_diag, l.center) < arm2 || d2(z_diag, l.center) > arm_band2)
    throw Error(ErrorCode::LadderInvalid, "band too thin for a diagonal start point");
  const walk::StepSampler sampler(law);

  DecouplingReport rep;
  rep.level = lev;
  std::vector<std::uint64_t> inner;
  std::vector<std::uint8_t> label;
  for (std::uint64_t i = 0; i < opts.replicas; ++i) {
    walk::Stream rng(opts.seed, i, "decoupling");
    const Point z = opts.environment == Environment::EntryPoint && i % 2 ? z_diag : z_axis;
    Point x = z;
    bool armed = true, skipped = false;
    std::uint64_t count = 0;
    while (true) {
      x = x + sampler.sample(rng);
      const double q = d2(x, l.center);
      if (q >= exit2) {
        skipped = skipped || q > exit_band2;
        break;
      }
      if (armed && q < in_band2) {
        ++count;
        armed = false;
        skipped = skipped || q < in2;
      } else if (!armed && q >= arm2) {
        armed = true;
        skipped = skipped || q > arm_band2;
      }
    }
    if (skipped) {
      ++rep.skipped;
      continue;
    }
    std::uint8_t cls;
    if (opts.environment == Environment::ExitSide) {
      const Point w = x - l.center, zc = z - l.center;
      cls = (w.x * zc.x + w.y * zc.y) >= 0 ? 0 : 1;
    } else if (opts.environment == Environment::EntryPoint) {
      cls = static_cast<std::uint8_t>(i % 2);
    } else {
      walk::Stream coin(opts.seed, i, "decoupling-label");
      cls = coin.uniform() < 0.5 ? 0 : 1;
    }
    inner.push_back(count);
    label.push_back(cls);
    ++rep.class_size[cls];
  }
  rep.used = inner.size();
  if (rep.class_size[0] == 0 || rep.class_size[1] == 0)
    throw Error(ErrorCode::InsufficientSamples, "an environment class is empty");

  const std::size_t support = static_cast<std::size_t>(*std::max_element(inner.begin(), inner.end())) + 1;
  for (int c = 0; c < 2; ++c) rep.pmf[c].assign(support, 0.0);
  for (std::size_t i = 0; i < inner.size(); ++i) rep.pmf[label[i]][inner[i]] += 1.0;
  for (int c = 0; c < 2; ++c)
    for (auto& p : rep.pmf[c]) p /= static_cast<double>(rep.class_size[c]);
  rep.tv = tv_distance(inner, label, support);

  // Permutation null and bootstrap spread.
  std::vector<std::size_t> idx0, idx1;
  for (std::size_t i = 0; i < label.size(); ++i) (label[i] ? idx1 : idx0).push_back(i);
  double null_sum = 0.0, bs = 0.0, bs2 = 0.0;
  std::vector<std::uint8_t> perm = label;
  std::vector<std::size_t> p0(idx0.size()), p1(idx1.size());
  for (int r = 0; r < opts.resamples; ++r) {
    walk::Stream rng(opts.seed, static_cast<std::uint64_t>(r), "decoupling-resample");
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    null_sum += tv_distance(inner, perm, support);
    for (auto& v : p0) v = idx0[rng.below(idx0.size())];
    for (auto& v : p1) v = idx1[rng.below(idx1.size())];
    const double t = tv_distance(inner, label, support, &p0, &p1);
    bs += t;
    bs2 += t * t;
  }
  if (opts.resamples > 0) {
    const double R = opts.resamples;
    rep.tv_null = null_sum / R;
    rep.tv_se = std::sqrt(std::max(0.0, bs2 / R - (bs / R) * (bs / R)));
  }
  return rep;
}

}  // namespace lwb::excursion
