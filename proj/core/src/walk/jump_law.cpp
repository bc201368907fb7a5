#include "lwb/walk/jump_law.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lwb/error.hpp"
#include "lwb/walk/presets.hpp"

namespace lwb::walk {

namespace {

constexpr int kPeriodWindow = 64;
constexpr int kMaxN0 = 64;

bool symmetric_table(const std::vector<JumpEntry>& entries) {
  std::map<std::pair<std::int64_t, std::int64_t>, double> m;
  for (const auto& e : entries) m[{e.offset.x, e.offset.y}] += e.p;
  for (const auto& [k, v] : m) {
    auto it = m.find({-k.first, -k.second});
    if (it == m.end() || it->second != v) return false;
  }
  return true;
}

}  // namespace

double PowerTail::prob(Point x) const {
  const auto r2 = static_cast<double>(norm2(x));
  if (r2 < r_min * r_min || r2 > r_max * r_max) return 0.0;
  if (exponent == 6.0) return coef / (r2 * r2 * r2);
  return coef * std::pow(r2, -exponent / 2.0);
}

double PowerTail::mass() const { return coef * power_sums(exponent, r_max).s_e; }

JumpLaw::JumpLaw(std::vector<JumpEntry> core, std::optional<PowerTail> tail, std::string preset)
    : tail_(std::move(tail)), preset_(std::move(preset)) {
  std::map<std::pair<std::int64_t, std::int64_t>, double> merged;
  for (const auto& e : core) merged[{e.offset.x, e.offset.y}] += e.p;
  for (const auto& [k, v] : merged) core_.push_back({{k.first, k.second}, v});
  for (const auto& e : core_) lookup_[pack(e.offset)] = e.p;
  compute_metadata();
}

double JumpLaw::prob(Point x) const {
  double p = 0.0;
  auto it = lookup_.find(pack(x));
  if (it != lookup_.end()) p = it->second;
  if (tail_) p += tail_->prob(x);
  return p;
}

double JumpLaw::total_mass() const {
  double s = 0.0;
  for (const auto& e : core_) s += e.p;
  if (tail_) s += tail_->mass();
  return s;
}

double JumpLaw::moment_exponent_budget() const {
  if (!tail_) return std::numeric_limits<double>::infinity();
  return tail_->exponent - 2.0;
}

bool JumpLaw::identity_covariance(double tol) const {
  return std::abs(cov_.xx - 1.0) <= tol && std::abs(cov_.yy - 1.0) <= tol &&
         std::abs(cov_.xy) <= tol;
}

std::vector<JumpEntry> JumpLaw::support_within(double radius) const {
  std::vector<JumpEntry> out;
  const double r2 = radius * radius;
  for (const auto& e : core_)
    if (static_cast<double>(norm2(e.offset)) <= r2 && !tail_) out.push_back(e);
  if (!tail_) return out;
  const auto m = static_cast<std::int64_t>(std::floor(radius));
  for (std::int64_t y = -m; y <= m; ++y) {
    for (std::int64_t x = -m; x <= m; ++x) {
      if (static_cast<double>(x * x + y * y) > r2) continue;
      const double p = prob({x, y});
      if (p > 0.0) out.push_back({{x, y}, p});
    }
  }
  return out;
}

double JumpLaw::exit_mass(Point y, const Disk& d) const {
  if (!tail_) {
    double s = 0.0;
    for (const auto& e : core_)
      if (!d.contains(y + e.offset)) s += e.p;
    return s;
  }
  double inside = 0.0;
  for (const auto& z : disk_points(d)) inside += prob(z - y);
  return std::max(0.0, total_mass() - inside);
}

void JumpLaw::compute_metadata() {
  cov_ = {};
  range_ = 0.0;
  for (const auto& e : core_) {
    const auto x = static_cast<double>(e.offset.x);
    const auto y = static_cast<double>(e.offset.y);
    cov_.xx += e.p * x * x;
    cov_.xy += e.p * x * y;
    cov_.yy += e.p * y * y;
    range_ = std::max(range_, norm(e.offset));
  }
  if (tail_) {
    const auto& ps = power_sums(tail_->exponent, tail_->r_max);
    cov_.xx += tail_->coef * ps.s_e2 / 2.0;
    cov_.yy += tail_->coef * ps.s_e2 / 2.0;
    range_ = std::max(range_, tail_->r_max);
  }

  // Supports of the n-step law restricted to a window; a cover found inside
  // the window is a valid certificate since restriction only removes points.
  const int w = kPeriodWindow;
  const int side = 2 * w + 1;
  auto idx = [&](std::int64_t x, std::int64_t y) { return (y + w) * side + (x + w); };
  std::vector<Point> steps;
  for (const auto& e : support_within(std::min<double>(w, range_ + 0.5)))
    if (e.p > 0.0) steps.push_back(e.offset);
  std::vector<char> cur(static_cast<std::size_t>(side * side), 0);
  cur[idx(0, 0)] = 1;
  n0_ = -1;
  for (int n = 1; n <= kMaxN0; ++n) {
    std::vector<char> next(cur.size(), 0);
    for (std::int64_t y = -w; y <= w; ++y) {
      for (std::int64_t x = -w; x <= w; ++x) {
        if (!cur[idx(x, y)]) continue;
        for (const auto& s : steps) {
          const auto nx = x + s.x, ny = y + s.y;
          if (nx < -w || nx > w || ny < -w || ny > w) continue;
          next[idx(nx, ny)] = 1;
        }
      }
    }
    cur.swap(next);
    bool covered = true;
    for (int dy = -1; dy <= 1 && covered; ++dy)
      for (int dx = -1; dx <= 1 && covered; ++dx) covered = cur[idx(dx, dy)];
    if (covered) {
      n0_ = n;
      break;
    }
  }
}

namespace {

LawDiagnostics diagnose(const JumpLaw& law, bool symmetric, const ValidateOptions& opts) {
  LawDiagnostics d;
  d.total_mass = law.total_mass();
  d.normalized = std::abs(d.total_mass - 1.0) <= opts.normalization_tol;
  d.symmetric = symmetric;
  d.covariance = law.covariance();
  d.identity_covariance = law.identity_covariance(opts.covariance_tol);
  d.aperiodicity_n0 = law.aperiodicity_n0();
  d.strongly_aperiodic = law.strongly_aperiodic();
  if (!d.normalized) d.errors.emplace_back(to_string(ErrorCode::NotNormalized));
  if (!d.symmetric) d.errors.emplace_back(to_string(ErrorCode::NotSymmetric));
  if (opts.require_identity_covariance && !d.identity_covariance)
    d.errors.emplace_back(to_string(ErrorCode::CovarianceMismatch));
  return d;
}

}  // namespace

ValidationResult validate_law(const std::vector<JumpEntry>& raw, const ValidateOptions& opts) {
  ValidationResult r;
  if (raw.empty()) {
    r.diagnostics.errors.emplace_back(to_string(ErrorCode::NotNormalized));
    return r;
  }
  for (const auto& e : raw) {
    if (!(e.p > 0.0)) {
      r.diagnostics.errors.emplace_back(to_string(ErrorCode::ZeroProbabilityEntry));
      return r;
    }
  }
  JumpLaw law(raw, std::nullopt, "custom");
  r.diagnostics = diagnose(law, symmetric_table(law.core()), opts);
  if (r.diagnostics.errors.empty()) r.law = std::move(law);
  return r;
}

JumpLaw make_law(const std::vector<JumpEntry>& raw, const ValidateOptions& opts) {
  auto r = validate_law(raw, opts);
  if (r.law) return std::move(*r.law);
  const auto& first = r.diagnostics.errors.front();
  for (auto c : {ErrorCode::ZeroProbabilityEntry, ErrorCode::NotNormalized, ErrorCode::NotSymmetric,
                 ErrorCode::CovarianceMismatch})
    if (first == to_string(c)) throw Error(c, "jump law rejected");
  throw Error(ErrorCode::NotNormalized, "jump law rejected");
}

ConditionAReport condition_a_scan(const JumpLaw& law, double beta, const std::vector<double>& radii,
                                  const std::vector<double>& widths) {
  ConditionAReport rep;
  rep.finite_range = law.finite_range();
  rep.beta = beta;
  rep.min_constant = std::numeric_limits<double>::infinity();
  for (double R : radii) {
    const auto inner = disk_points({{0, 0}, R});
    for (double s : widths) {
      double inf_sum = std::numeric_limits<double>::infinity();
      // |y| <= R+s inclusive on the outside.
      for (const auto& y : annulus_points({0, 0}, R, R + s + 1e-9)) {
        double sum = 0.0;
        for (const auto& z : inner) sum += law.prob(z - y);
        inf_sum = std::min(inf_sum, sum);
      }
      const double env = std::exp(-beta * std::pow(s, 0.25));
      rep.scans.push_back({R, s, inf_sum, env});
      rep.min_constant = std::min(rep.min_constant, inf_sum / env);
    }
  }
  if (rep.scans.empty()) rep.min_constant = 0.0;
  return rep;
}

}  // namespace lwb::walk
