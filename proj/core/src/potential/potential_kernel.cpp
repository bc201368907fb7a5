#include "lwb/potential/potential_kernel.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/expint.hpp>

#include "lwb/error.hpp"

namespace lwb::potential {

namespace {

// Ein(z) = int_0^z (1 - e^-u)/u du.
double ein(double z) {
  if (z <= 0.0) return 0.0;
  if (z <= 4.0) {
    double term = z, sum = 0.0;
    for (int k = 1; k < 200; ++k) {
      sum += term / k;
      term *= -z / (k + 1);
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return boost::math::expint(1, z) + std::log(z) + std::numbers::egamma;
}

bool symmetric_core(const walk::JumpLaw& law) {
  for (const auto& e : law.core())
    if (law.prob(-e.offset) != law.prob(e.offset)) return false;
  return true;
}

}  // namespace

double gaussian_tail_sum(double c, int N) {
  if (c <= 0.0) return 0.0;
  const double t = N;
  const double E = std::exp(-c / t);
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t, t6 = t5 * t, t7 = t6 * t;
  const double h = (1.0 - E) / t;
  const double h1 = -1.0 / t2 + E * (1.0 / t2 - c / t3);
  const double h3 = -6.0 / t4 + E * (6.0 / t4 - 18.0 * c / t5 + 9.0 * c * c / t6 - c * c * c / t7);
  return ein(c / t) + h / 2.0 - h1 / 12.0 + h3 / 720.0;
}

PotentialKernelModel potential_kernel(const walk::JumpLaw& law, std::int64_t box,
                                      const PotentialKernelOptions& opts) {
  if (!law.strongly_aperiodic()) throw Error(ErrorCode::NotAperiodic, "potential kernel needs strong aperiodicity");
  if (!symmetric_core(law)) throw Error(ErrorCode::NotSymmetric, "potential kernel needs a symmetric law");
  if (box < 2) throw Error(ErrorCode::ConfigInvalid, "box radius must be at least 2");

  PotentialKernelModel m;
  m.box = box;
  const double lb = std::log(static_cast<double>(box));
  const int N = opts.n_cut > 0 ? opts.n_cut
                               : std::max(1, static_cast<int>(std::ceil(static_cast<double>(box * box) / (lb * lb))) - 1);
  const auto& cov = law.covariance();
  const double sigma = std::sqrt(std::max(cov.xx, cov.yy));
  const double reach = law.finite_range() ? std::ceil(law.range()) : 0.0;
  const auto W = box + static_cast<std::int64_t>(reach) +
                 static_cast<std::int64_t>(std::ceil(opts.margin_sigmas * sigma * std::sqrt(static_cast<double>(N))));
  m.truncation = {N, W, 0.0, "euler-maclaurin around Ein"};
  m.log_coefficient = opts.log_coefficient > 0.0 ? opts.log_coefficient : 2.0 / std::numbers::pi;

  const double det = cov.xx * cov.yy - cov.xy * cov.xy;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  auto quad = [&](Point x) {
    const double px = static_cast<double>(x.x), py = static_cast<double>(x.y);
    return (cov.yy * px * px - 2.0 * cov.xy * px * py + cov.xx * py * py) / det;
  };

  Grid s(box), g_head(box);
  m.i3 = Grid(box);
  TransitionIterator it(law, W);
  for (int n = 0; n < N; ++n) {
    const auto& p = it.current();
    const double p0 = p.at({0, 0});
    const double q0 = n == 0 ? 1.0 : norm / n;
    m.i1 += p0 - q0;
    for (std::int64_t y = -box; y <= box; ++y) {
      for (std::int64_t x = -box; x <= box; ++x) {
        const Point z{x, y};
        const double pz = p.at(z);
        const double qz = n == 0 ? (x == 0 && y == 0 ? 1.0 : 0.0) : norm / n * std::exp(-quad(z) / (2.0 * n));
        s.at(z) += p0 - pz;
        g_head.at(z) += q0 - qz;
        m.i3.at(z) += qz - pz;
      }
    }
    it.step();
  }
  m.truncation.mass_loss = std::max(0.0, it.mass_loss());

  m.table = Grid(box);
  m.i2 = Grid(box);
  for (std::int64_t y = -box; y <= box; ++y) {
    for (std::int64_t x = -box; x <= box; ++x) {
      const Point z{x, y};
      const double tail = norm * gaussian_tail_sum(quad(z) / 2.0, N);
      m.i2.at(z) = g_head.at(z) + tail;
      m.table.at(z) = s.at(z) + tail;
    }
  }
  // Exact a(x) = a(-x) and a(0) = 0.
  for (std::int64_t y = -box; y <= box; ++y) {
    for (std::int64_t x = -box; x <= box; ++x) {
      const double v = (m.table.at({x, y}) + m.table.at({-x, -y})) / 2.0;
      m.table.at({x, y}) = v;
      m.table.at({-x, -y}) = v;
    }
  }
  m.table.at({0, 0}) = 0.0;

  // Shell fit with the stated log coefficient, plus a free slope.
  double sum_dev = 0.0, sl = 0.0, sa = 0.0, sll = 0.0, sla = 0.0;
  std::vector<std::pair<double, double>> shell;
  for (std::int64_t y = -box; y <= box; ++y) {
    for (std::int64_t x = -box; x <= box; ++x) {
      const double r = walk::norm({x, y});
      if (r < opts.fit_r_min || r > opts.fit_r_max) continue;
      const double a = m.table.at({x, y});
      const double l = std::log(r);
      shell.emplace_back(l, a);
      sum_dev += a - m.log_coefficient * l;
      sl += l;
      sa += a;
      sll += l * l;
      sla += l * a;
    }
  }
  m.shell_points = shell.size();
  if (!shell.empty()) {
    const double cnt = static_cast<double>(shell.size());
    m.k_hat = sum_dev / cnt;
    for (const auto& [l, a] : shell)
      m.shell_max_deviation = std::max(m.shell_max_deviation, std::abs(a - m.log_coefficient * l - m.k_hat));
    m.shell_free_slope = (cnt * sla - sl * sa) / (cnt * sll - sl * sl);
  }
  return m;
}

double PotentialKernelModel::harmonicity_residual(const walk::JumpLaw& law, double radius) const {
  const auto steps = law.support_within(static_cast<double>(box));
  double worst = 0.0;
  const auto m = static_cast<std::int64_t>(std::ceil(radius));
  for (std::int64_t y = -m; y <= m; ++y) {
    for (std::int64_t x = -m; x <= m; ++x) {
      const Point z{x, y};
      const double r = walk::norm(z);
      if (r == 0.0 || r >= radius) continue;
      double s = 0.0;
      for (const auto& e : steps) {
        const Point w = z + e.offset;
        if (table.in(w)) s += e.p * table.at(w);
      }
      worst = std::max(worst, std::abs(s - table.at(z)));
    }
  }
  return worst;
}

double PotentialKernelModel::origin_excess(const walk::JumpLaw& law) const {
  double s = 0.0;
  for (const auto& e : law.support_within(static_cast<double>(box)))
    if (table.in(e.offset)) s += e.p * table.at(e.offset);
  return s;
}

}  // namespace lwb::potential
