#include "lwb/potential/transition.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "fft_conv.hpp"
#include "lwb/error.hpp"

namespace lwb::potential {

double Grid::sum() const {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s);
}

struct TransitionIterator::Impl {
  std::unique_ptr<detail::BoxConvolver> conv;
};

TransitionIterator::TransitionIterator(const walk::JumpLaw& law, std::int64_t box_half)
    : law_(law), p_(box_half), scratch_(box_half) {
  p_.at({0, 0}) = 1.0;
  if (!law_.finite_range()) {
    impl_ = new Impl;
    impl_->conv = std::make_unique<detail::BoxConvolver>(law_, p_.side(), p_.side());
  }
}

TransitionIterator::~TransitionIterator() { delete impl_; }

void TransitionIterator::step() {
  const auto h = p_.half;
  if (law_.finite_range()) {
    const auto reach = static_cast<std::int64_t>(std::ceil(law_.range()));
    const auto s_new = std::min(h, support_ + reach);
    std::fill(scratch_.v.begin(), scratch_.v.end(), 0.0);
    const auto side = p_.side();
    for (std::int64_t y = -support_; y <= support_; ++y) {
      for (std::int64_t x = -support_; x <= support_; ++x) {
        const double v = p_.v[static_cast<std::size_t>((y + h) * side + (x + h))];
        if (v == 0.0) continue;
        for (const auto& e : law_.core()) {
          const auto nx = x + e.offset.x, ny = y + e.offset.y;
          if (nx < -h || nx > h || ny < -h || ny > h) continue;
          scratch_.v[static_cast<std::size_t>((ny + h) * side + (nx + h))] += e.p * v;
        }
      }
    }
    support_ = s_new;
    std::swap(p_.v, scratch_.v);
  } else {
    impl_->conv->apply(p_.v, scratch_.v);
    for (auto& x : scratch_.v) x = std::max(x, 0.0);
    std::swap(p_.v, scratch_.v);
    support_ = h;
  }
  ++n_;
}

TransitionResult transition_probabilities(const walk::JumpLaw& law, int n, std::int64_t box,
                                          double loss_budget) {
  if (n < 0) throw Error(ErrorCode::ConfigInvalid, "n must be nonnegative");
  TransitionIterator it(law, box);
  for (int i = 0; i < n; ++i) it.step();
  TransitionResult r{it.current(), std::max(0.0, it.mass_loss())};
  if (law.finite_range() && r.mass_loss > loss_budget)
    throw Error(ErrorCode::BoxTooSmall, "mass loss " + std::to_string(r.mass_loss) + " exceeds budget");
  return r;
}

double gaussian_kernel(int n, Point x) {
  if (n == 0) return (x.x == 0 && x.y == 0) ? 1.0 : 0.0;
  const double nn = n;
  return std::exp(-static_cast<double>(walk::norm2(x)) / (2.0 * nn)) / (2.0 * std::numbers::pi * nn);
}

double gaussian_kernel(int n, Point x, const walk::Covariance& c) {
  if (n == 0) return (x.x == 0 && x.y == 0) ? 1.0 : 0.0;
  const double det = c.xx * c.yy - c.xy * c.xy;
  const double px = static_cast<double>(x.x), py = static_cast<double>(x.y);
  const double q = (c.yy * px * px - 2.0 * c.xy * px * py + c.xx * py * py) / det;
  const double nn = n;
  return std::exp(-q / (2.0 * nn)) / (2.0 * std::numbers::pi * nn * std::sqrt(det));
}

LcltFit lclt_decay(const walk::JumpLaw& law, int n_min, int n_max, int stride, std::int64_t box,
                   bool match_covariance) {
  LcltFit fit;
  TransitionIterator it(law, box);
  const walk::Covariance unit{1.0, 0.0, 1.0};
  const auto& cov = match_covariance ? law.covariance() : unit;
  for (int n = 1; n <= n_max; ++n) {
    it.step();
    if (n < n_min || (n - n_min) % stride != 0) continue;
    const auto& g = it.current();
    double sup = 0.0;
    for (std::int64_t y = -box; y <= box; ++y)
      for (std::int64_t x = -box; x <= box; ++x)
        sup = std::max(sup, std::abs(g.at({x, y}) - gaussian_kernel(n, {x, y}, cov)));
    fit.points.push_back({n, sup, std::max(0.0, it.mass_loss())});
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(fit.points.size());
  for (const auto& p : fit.points) {
    const double lx = std::log(static_cast<double>(p.n)), ly = std::log(p.sup_error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

}  // namespace lwb::potential
