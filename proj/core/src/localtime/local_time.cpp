#include "lwb/localtime/local_time.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "lwb/error.hpp"
#include "lwb/potential/green.hpp"
#include "lwb/walk/alias_table.hpp"
#include "lwb/walk/rng.hpp"

namespace lwb::localtime {

using potential::Domain;
using potential::DomainSolver;

double LocalTimeLaw::pmf(std::uint64_t n) const {
  if (n == 0) return 1.0 - h;
  const double p = 1.0 / g;
  return h * p * std::pow(1.0 - p, static_cast<double>(n - 1));
}

double LocalTimeLaw::tail(std::uint64_t n) const {
  if (n == 0) return 1.0;
  return h * std::pow(1.0 - 1.0 / g, static_cast<double>(n - 1));
}

double LocalTimeLaw::rising_moment(int k) const {
  return h * boost::math::factorial<double>(static_cast<unsigned>(k)) * std::pow(g, k);
}

double LocalTimeLaw::power_moment(int k) const {
  // x^k = sum_j (-1)^{k-j} S(k,j) x(x+1)...(x+j-1), S the Stirling numbers of
  // the second kind.
  std::vector<std::vector<double>> S(static_cast<std::size_t>(k + 1), std::vector<double>(static_cast<std::size_t>(k + 1), 0.0));
  S[0][0] = 1.0;
  for (int n = 1; n <= k; ++n)
    for (int j = 1; j <= n; ++j) S[n][j] = j * S[n - 1][j] + S[n - 1][j - 1];
  double m = 0.0;
  for (int j = 1; j <= k; ++j) m += ((k - j) % 2 ? -1.0 : 1.0) * S[k][j] * rising_moment(j);
  return m;
}

double LocalTimeLaw::laplace(double lambda) const { return 1.0 - h + h / (std::expm1(lambda) * g + 1.0); }

double LocalTimeLaw::laplace_direct(double lambda) const {
  long double s = 1.0L - h;
  const long double p = 1.0L / g, q = 1.0L - p, e = std::exp(-static_cast<long double>(lambda));
  long double term = h * p * e;  // n = 1
  for (std::uint64_t n = 1; term > 1e-22L || n < 4; ++n) {
    s += term;
    term *= q * e;
  }
  return static_cast<double>(s);
}

LocalTimeLaw local_time_law(const walk::JumpLaw& law, double radius, Point x0) {
  const walk::Disk d{{0, 0}, radius};
  if (!d.contains(x0)) throw Error(ErrorCode::GeometryInvalid, "x0 must lie in D(0,R)");
  LocalTimeLaw lt;
  lt.radius = radius;
  lt.x0 = x0;
  DomainSolver s(law, Domain::disk(d));
  const auto col = potential::green_column(s, {0, 0});
  lt.g = col[s.domain().index({0, 0})];
  lt.g_x0 = col[s.domain().index(x0)];
  if (x0 == Point{0, 0}) {
    lt.h = 1.0;
  } else {
    std::vector<Point> rest;
    for (const auto& p : s.domain().points())
      if (!(p == Point{0, 0})) rest.push_back(p);
    DomainSolver punctured(law, Domain(std::move(rest)));
    const auto hit = punctured.solve(punctured.step_mass_into(Domain({Point{0, 0}})));
    lt.h = hit[punctured.domain().index(x0)];
  }
  return lt;
}

double local_time_moments(const walk::JumpLaw& law, double radius, Point x0, int k) {
  if (k < 1) throw Error(ErrorCode::ConfigInvalid, "moment order must be at least 1");
  const walk::Disk d{{0, 0}, radius};
  if (!d.contains(x0)) throw Error(ErrorCode::GeometryInvalid, "x0 must lie in D(0,R)");
  DomainSolver s(law, Domain::disk(d));
  const auto col = potential::green_column(s, {0, 0});
  const double g00 = col[s.domain().index({0, 0})], gx = col[s.domain().index(x0)];
  return boost::math::factorial<double>(static_cast<unsigned>(k)) * gx * std::pow(g00, k - 1);
}

TailBoundReport tail_bound_check(const LocalTimeLaw& lt, const std::vector<double>& z_grid) {
  TailBoundReport rep;
  for (double z : z_grid) {
    if (z < 1.0) throw Error(ErrorCode::ConfigInvalid, "tail grid needs z >= 1");
    const double p = lt.tail(static_cast<std::uint64_t>(std::ceil(z * lt.g)));
    rep.z.push_back(z);
    rep.exact.push_back(p);
    rep.c_min = std::max(rep.c_min, p / (std::sqrt(z) * std::exp(-z)));
  }
  return rep;
}

LaplaceReport laplace_transform_check(const LocalTimeLaw& lt, const std::vector<double>& phi_grid) {
  const double nx = walk::norm(lt.x0);
  if (nx == 0.0) throw Error(ErrorCode::GeometryInvalid, "the leading term needs x0 != 0");
  LaplaceReport rep;
  for (double phi : phi_grid) {
    if (!(phi > 0.0 && phi <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "phi must lie in (0, 1]");
    const double lambda = phi / lt.g;
    const double exact = lt.laplace(lambda);
    const double lead = 1.0 - std::log(lt.radius / nx) / std::log(lt.radius) * phi / (1.0 + phi);
    rep.phi.push_back(phi);
    rep.exact.push_back(exact);
    rep.leading.push_back(lead);
    rep.max_closed_vs_direct = std::max(rep.max_closed_vs_direct, std::abs(exact - lt.laplace_direct(lambda)));
    rep.max_deviation = std::max(rep.max_deviation, std::abs(exact - lead));
  }
  return rep;
}

std::vector<std::uint64_t> simulate_local_times(const walk::JumpLaw& law, double radius, Point x0,
                                                std::uint64_t replicas, std::uint64_t seed) {
  const walk::Disk d{{0, 0}, radius};
  const walk::StepSampler sampler(law);
  std::vector<std::uint64_t> out(replicas);
  for (std::uint64_t i = 0; i < replicas; ++i) {
    walk::Stream rng(seed, i, "localtime");
    Point x = x0;
    std::uint64_t l = 0;
    while (d.contains(x)) {
      if (x.x == 0 && x.y == 0) ++l;
      x = x + sampler.sample(rng);
    }
    out[i] = l;
  }
  return out;
}

ChiSquareReport chi_square_test(const LocalTimeLaw& lt, const std::vector<std::uint64_t>& samples,
                                double min_expected) {
  const double N = static_cast<double>(samples.size());
  if (N * (1.0 - lt.h) < min_expected && lt.h < 1.0)
    throw Error(ErrorCode::InsufficientSamples, "too few samples for the chi-square bins");
  ChiSquareReport rep;
  std::uint64_t lo = lt.h < 1.0 ? 0 : 1;
  while (true) {
    if (N * lt.tail(lo) < 2.0 * min_expected) {
      rep.bin_lo.push_back(lo);
      rep.expected.push_back(N * lt.tail(lo));
      break;
    }
    std::uint64_t hi = lo;
    double e = 0.0;
    while (e < min_expected) e += N * lt.pmf(hi++);
    rep.bin_lo.push_back(lo);
    rep.expected.push_back(e);
    lo = hi;
  }
  rep.observed.assign(rep.bin_lo.size(), 0);
  for (auto v : samples) {
    const auto it = std::upper_bound(rep.bin_lo.begin(), rep.bin_lo.end(), v);
    if (it == rep.bin_lo.begin()) throw Error(ErrorCode::ConfigInvalid, "sample below the support");
    ++rep.observed[static_cast<std::size_t>(it - rep.bin_lo.begin() - 1)];
  }
  for (std::size_t i = 0; i < rep.bin_lo.size(); ++i) {
    const double d = static_cast<double>(rep.observed[i]) - rep.expected[i];
    rep.statistic += d * d / rep.expected[i];
  }
  rep.dof = static_cast<int>(rep.bin_lo.size()) - 1;
  if (rep.dof < 1) throw Error(ErrorCode::InsufficientSamples, "chi-square needs at least two bins");
  boost::math::chi_squared dist(rep.dof);
  rep.p_value = boost::math::cdf(boost::math::complement(dist, rep.statistic));
  return rep;
}

}  // namespace lwb::localtime
