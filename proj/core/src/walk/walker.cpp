#include "lwb/walk/walker.hpp"

#include "lwb/error.hpp"

namespace lwb::walk {

std::uint64_t LocalTimeField::total_visits() const {
  std::uint64_t s = 0;
  for (const auto& [p, c] : counts_) s += c;
  return s;
}

ExitResult run_until_exit(Point start, const Disk& domain, const StepSampler& sampler, Stream& rng,
                          const RunOptions& opts) {
  ExitResult res;
  if (opts.record_local_time) res.local_time.emplace();
  Point x = start;
  std::uint64_t t = 0;
  const Point c = domain.center;
  const double r2 = domain.radius * domain.radius;
  auto inside = [&](Point p) { return static_cast<double>(norm2(p - c)) < r2; };
  while (inside(x)) {
    if (res.local_time) res.local_time->visit(x);
    if (t == opts.max_steps)
      throw Error(ErrorCode::MaxStepsExceeded, "walk did not exit within " + std::to_string(t) + " steps");
    x = x + sampler.sample(rng);
    ++t;
  }
  // The exit point is counted too, so the field covers times 0..exit_time.
  if (res.local_time) {
    res.local_time->visit(x);
    res.local_time->total_steps = t;
  }
  res.exit_point = x;
  res.exit_time = t;
  return res;
}

}  // namespace lwb::walk
