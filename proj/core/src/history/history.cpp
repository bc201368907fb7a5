#include "lwb/history/history.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <map>

#include "lwb/error.hpp"

namespace lwb::history {

// ---- histories --------------------------------------------------------------

std::uint64_t HistorySpec::length() const {
  std::uint64_t s = 0;
  for (auto v : m) s += v;
  return 2 * s + 1;
}

HistorySpec history_spec(int n, std::vector<std::uint64_t> m) {
  if (n < 2) throw Error(ErrorCode::ConfigInvalid, "history depth must be at least 2");
  if (m.size() != static_cast<std::size_t>(n - 1)) throw Error(ErrorCode::ConfigInvalid, "need m_2..m_n");
  for (auto v : m)
    if (v < 1) throw Error(ErrorCode::ConfigInvalid, "upcrossing counts must be at least 1");
  return {n, std::move(m)};
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt count_histories(const HistorySpec& s) {
  BigInt c = 1;
  for (int l = 2; l <= s.n - 1; ++l) c *= binomial(s.at(l + 1) + s.at(l) - 1, s.at(l) - 1);
  return c;
}

std::vector<std::vector<int>> enumerate_histories(const HistorySpec& s, std::uint64_t cap) {
  const std::uint64_t len = s.length();
  if (len > cap) throw Error(ErrorCode::CapExceeded, "history length exceeds the enumeration cap");
  std::vector<std::vector<int>> out;
  std::vector<int> path{1};
  std::vector<std::uint64_t> left(static_cast<std::size_t>(s.n + 1), 0);
  for (int l = 2; l <= s.n; ++l) left[static_cast<std::size_t>(l)] = s.at(l);
  std::function<void()> go = [&] {
    const int cur = path.back();
    const auto t = path.size() - 1;
    if (t == len) {
      if (cur == 0) out.push_back(path);
      return;
    }
    if (cur == 0) return;
    if (cur < s.n && left[static_cast<std::size_t>(cur + 1)] > 0) {
      --left[static_cast<std::size_t>(cur + 1)];
      path.push_back(cur + 1);
      go();
      path.pop_back();
      ++left[static_cast<std::size_t>(cur + 1)];
    }
    // down to 0 only as the final step, with every upcrossing used
    if (cur > 1 || t + 1 == len) {
      path.push_back(cur - 1);
      go();
      path.pop_back();
    }
  };
  go();
  for (const auto& p : out)
    for (int l = 2; l <= s.n; ++l) {
      std::uint64_t u = 0;
      for (std::size_t j = 0; j + 1 < p.size(); ++j) u += p[j] == l - 1 && p[j + 1] == l;
      if (u != s.at(l)) throw Error(ErrorCode::ConfigInvalid, "enumeration produced a wrong upcrossing count");
    }
  return out;
}

std::vector<HistorySpec> all_specs(std::uint64_t max_length) {
  std::vector<HistorySpec> out;
  const std::uint64_t total = (max_length - 1) / 2;
  std::vector<std::uint64_t> m;
  std::function<void(std::uint64_t)> grow = [&](std::uint64_t room) {
    if (!m.empty()) out.push_back({static_cast<int>(m.size()) + 1, m});
    for (std::uint64_t v = 1; v <= room; ++v) {
      m.push_back(v);
      grow(room - v);
      m.pop_back();
    }
  };
  grow(total);
  return out;
}

double rate_function(double x) {
  const double l2 = std::log(2.0);
  const double xlx = x > 0.0 ? x * std::log(x) : 0.0;
  return -(1.0 + x) * std::log1p(x) + xlx + x * l2 + l2;
}

// ---- windows ----------------------------------------------------------------

double Windows::target(int k) const { return 3.0 * a * k * k * std::log(static_cast<double>(k)); }

std::uint64_t Windows::lo(int k) const {
  if (k < k0) return 1;
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(target(k) - k)));
}

std::uint64_t Windows::hi(int k) const {
  if (k < k0) return 1;
  return static_cast<std::uint64_t>(std::floor(target(k) + k));
}

Windows windows(double a, int k0) {
  if (!(a > 0.0 && a < 2.0)) throw Error(ErrorCode::ConfigInvalid, "a must lie in (0, 2)");
  Windows w{a, k0};
  if (k0 <= 0) {
    int k = 1;
    while (w.target(k) < 2.0 * k) ++k;
    w.k0 = std::max(4, k);
  }
  return w;
}

// ---- MPFR helpers -----------------------------------------------------------

namespace {

class Mp {
 public:
  explicit Mp(mpfr_prec_t p) {
    mpfr_init2(v, p);
    mpfr_set_zero(v, 1);
  }
  Mp(const Mp& o) {
    mpfr_init2(v, mpfr_get_prec(o.v));
    mpfr_set(v, o.v, MPFR_RNDN);
  }
  Mp(Mp&& o) noexcept {
    mpfr_init2(v, MPFR_PREC_MIN);
    mpfr_swap(v, o.v);
  }
  Mp& operator=(const Mp& o) {
    if (this != &o) {
      mpfr_set_prec(v, mpfr_get_prec(o.v));
      mpfr_set(v, o.v, MPFR_RNDN);
    }
    return *this;
  }
  ~Mp() { mpfr_clear(v); }
  mpfr_t v;
};

struct Iv {
  Mp lo, hi;
  explicit Iv(mpfr_prec_t p) : lo(p), hi(p) {}
};

// log x! enclosed from both sides.
class LogFactorial {
 public:
  explicit LogFactorial(mpfr_prec_t p) : p_(p) {}
  const Iv& operator()(std::uint64_t x) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    Iv r(p_);
    Mp arg(p_);
    mpfr_set_ui(arg.v, 0, MPFR_RNDN);
    mpfr_add_d(arg.v, arg.v, static_cast<double>(x) + 1.0, MPFR_RNDN);  // exact below 2^53
    mpfr_lngamma(r.lo.v, arg.v, MPFR_RNDD);
    mpfr_lngamma(r.hi.v, arg.v, MPFR_RNDU);
    return cache_.emplace(x, std::move(r)).first->second;
  }

 private:
  mpfr_prec_t p_;
  std::map<std::uint64_t, Iv> cache_;
};

BigInt to_bigint(const mpz_t z) {
  char* s = mpz_get_str(nullptr, 10, z);
  BigInt r(s);
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(s, std::strlen(s) + 1);
  return r;
}

BigRational to_rational(const mpfr_t x) {
  if (mpfr_zero_p(x)) return 0;
  mpz_t z;
  mpz_init(z);
  const mpfr_exp_t e = mpfr_get_z_2exp(z, x);
  BigInt m = to_bigint(z);
  mpz_clear(z);
  if (e >= 0) return BigRational(m << static_cast<unsigned>(e));
  return BigRational(m, BigInt(1) << static_cast<unsigned>(-e));
}

double log_of(const mpfr_t x) {
  long e = 0;
  const double d = mpfr_get_d_2exp(&e, x, MPFR_RNDN);
  return std::log(d) + static_cast<double>(e) * std::log(2.0);
}

// Interval for C(m+l, l) 2^-(m+l+1).
Iv binomial_term(std::uint64_t m, std::uint64_t l, mpfr_prec_t p, LogFactorial& lf) {
  const Iv& a = lf(m + l);
  const Iv& b = lf(m);
  const Iv& c = lf(l);
  Iv out(p);
  Mp ln2(p), t(p);
  const double pw = static_cast<double>(m + l + 1);
  mpfr_const_log2(ln2.v, MPFR_RNDU);
  mpfr_mul_d(t.v, ln2.v, pw, MPFR_RNDU);
  mpfr_sub(out.lo.v, a.lo.v, b.hi.v, MPFR_RNDD);
  mpfr_sub(out.lo.v, out.lo.v, c.hi.v, MPFR_RNDD);
  mpfr_sub(out.lo.v, out.lo.v, t.v, MPFR_RNDD);
  mpfr_exp(out.lo.v, out.lo.v, MPFR_RNDD);
  mpfr_const_log2(ln2.v, MPFR_RNDD);
  mpfr_mul_d(t.v, ln2.v, pw, MPFR_RNDD);
  mpfr_sub(out.hi.v, a.hi.v, b.lo.v, MPFR_RNDU);
  mpfr_sub(out.hi.v, out.hi.v, c.lo.v, MPFR_RNDU);
  mpfr_sub(out.hi.v, out.hi.v, t.v, MPFR_RNDU);
  mpfr_exp(out.hi.v, out.hi.v, MPFR_RNDU);
  return out;
}

}  // namespace

// ---- Stirling regime --------------------------------------------------------

StirlingBand stirling_band(int k, double a, std::uint64_t m, std::uint64_t l) {
  if (k < 2) throw Error(ErrorCode::ConfigInvalid, "k must be at least 2");
  const Windows w{a, 0};
  const double dm = static_cast<double>(m), dl = static_cast<double>(l);
  if (std::abs(dm - w.target(k + 1)) > k + 1 || std::abs(dl + 1.0 - w.target(k)) > k)
    throw Error(ErrorCode::OutOfWindow, "(m, l) outside the Stirling window");
  constexpr mpfr_prec_t p = 192;
  LogFactorial lf(p);
  const Iv v = binomial_term(m, l, p, lf);
  StirlingBand r;
  r.value_lower = mpfr_get_d(v.lo.v, MPFR_RNDD);
  r.value_upper = mpfr_get_d(v.hi.v, MPFR_RNDU);
  r.value = mpfr_get_d(v.lo.v, MPFR_RNDN);
  r.reference = std::pow(static_cast<double>(k), -3.0 * a - 1.0) / std::sqrt(std::log(static_cast<double>(k)));
  r.ratio = r.value / r.reference;
  return r;
}

StirlingSweep stirling_sweep(double a, int k_lo, int k_hi) {
  if (k_lo < 2 || k_hi < k_lo) throw Error(ErrorCode::ConfigInvalid, "need 2 <= k_lo <= k_hi");
  const Windows w{a, 0};
  const auto top = static_cast<std::size_t>(2.0 * (w.target(k_hi + 1) + k_hi + 2)) + 2;
  std::vector<long double> lg(top + 1);
  for (std::size_t x = 0; x <= top; ++x) lg[x] = std::lgamma(static_cast<long double>(x) + 1.0L);
  const long double ln2 = std::log(2.0L);
  StirlingSweep s;
  s.a = a;
  s.k_lo = k_lo;
  s.k_hi = k_hi;
  s.min_ratio = std::numeric_limits<double>::infinity();
  s.max_ratio = 0.0;
  std::uint64_t min_m = 0, min_l = 0, max_m = 0, max_l = 0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double tm = w.target(k + 1), tl = w.target(k);
    const auto m_lo = static_cast<std::uint64_t>(std::max(0.0, std::ceil(tm - (k + 1))));
    const auto m_hi = static_cast<std::uint64_t>(std::floor(tm + (k + 1)));
    const auto l_lo = static_cast<std::uint64_t>(std::max(0.0, std::ceil(tl - k - 1.0)));
    const auto l_hi = static_cast<std::uint64_t>(std::floor(tl + k - 1.0));
    const long double ref = -(3.0L * a + 1.0L) * std::log(static_cast<long double>(k)) -
                            0.5L * std::log(std::log(static_cast<long double>(k)));
    for (auto m = m_lo; m <= m_hi; ++m)
      for (auto l = l_lo; l <= l_hi; ++l) {
        const long double lv = lg[m + l] - lg[m] - lg[l] - static_cast<long double>(m + l + 1) * ln2;
        const auto r = static_cast<double>(std::exp(lv - ref));
        ++s.points;
        if (r < s.min_ratio) {
          s.min_ratio = r;
          s.argmin_k = k;
          min_m = m;
          min_l = l;
        }
        if (r > s.max_ratio) {
          s.max_ratio = r;
          s.argmax_k = k;
          max_m = m;
          max_l = l;
        }
      }
  }
  s.min_ratio = stirling_band(s.argmin_k, a, min_m, min_l).ratio;
  s.max_ratio = stirling_band(s.argmax_k, a, max_m, max_l).ratio;
  s.C = std::max(s.max_ratio, 1.0 / s.min_ratio);
  s.spread = s.max_ratio / s.min_ratio;
  return s;
}

// ---- ladder sum -------------------------------------------------------------

namespace {

struct Range {
  int first, last;
};

Range sum_range(int n, const LadderSumOptions& o) {
  const int last = o.last > 0 ? o.last : n;
  if (o.first < 2 || last < o.first || last > n) throw Error(ErrorCode::ConfigInvalid, "invalid level range");
  return {o.first, last};
}

}  // namespace

LadderSumResult ladder_sum(double a, int n, const LadderSumOptions& opts) {
  if (n < 2) throw Error(ErrorCode::ConfigInvalid, "ladder sum needs n >= 2");
  if (n > 60) throw Error(ErrorCode::PrecisionBudgetExceeded, "ladder sum limited to n <= 60");
  const Windows w = windows(a, opts.k0);
  const auto [first, last] = sum_range(n, opts);

  for (mpfr_prec_t p = 256; p <= opts.max_bits; p *= 2) {
    LogFactorial lf(p);
    std::vector<Iv> F;
    std::uint64_t lo = w.lo(first), hi = w.hi(first);
    for (auto m = lo; m <= hi; ++m) {
      Iv one(p);
      mpfr_set_ui(one.lo.v, 1, MPFR_RNDN);
      mpfr_set_ui(one.hi.v, 1, MPFR_RNDN);
      F.push_back(std::move(one));
    }
    LadderSumResult r;
    r.log_factors.push_back(std::log(static_cast<double>(hi - lo + 1)));
    double prev_log = r.log_factors.back();
    for (int l = first; l < last; ++l) {
      const std::uint64_t nlo = w.lo(l + 1), nhi = w.hi(l + 1);
      std::vector<Iv> G;
      for (auto mp = nlo; mp <= nhi; ++mp) G.emplace_back(p);
      Iv f(p);
      for (auto m = lo; m <= hi; ++m) {
        // f(m, m') = C(m'+m-1, m-1) 2^-(m'+m), stepped in m' by (m'+m)/(2(m'+1))
        f = binomial_term(nlo, m - 1, p, lf);
        for (auto mp = nlo; mp <= nhi; ++mp) {
          if (mp > nlo) {
            const double num = static_cast<double>(mp - 1 + m), den = 2.0 * static_cast<double>(mp);
            mpfr_mul_d(f.lo.v, f.lo.v, num, MPFR_RNDD);
            mpfr_div_d(f.lo.v, f.lo.v, den, MPFR_RNDD);
            mpfr_mul_d(f.hi.v, f.hi.v, num, MPFR_RNDU);
            mpfr_div_d(f.hi.v, f.hi.v, den, MPFR_RNDU);
          }
          Iv& g = G[mp - nlo];
          const Iv& src = F[m - lo];
          Mp t(p);
          mpfr_mul(t.v, src.lo.v, f.lo.v, MPFR_RNDD);
          mpfr_add(g.lo.v, g.lo.v, t.v, MPFR_RNDD);
          mpfr_mul(t.v, src.hi.v, f.hi.v, MPFR_RNDU);
          mpfr_add(g.hi.v, g.hi.v, t.v, MPFR_RNDU);
        }
      }
      F = std::move(G);
      lo = nlo;
      hi = nhi;
      Mp T(p);
      for (const auto& x : F) mpfr_add(T.v, T.v, x.lo.v, MPFR_RNDN);
      const double cur = log_of(T.v);
      r.log_factors.push_back(cur - prev_log);
      prev_log = cur;
    }
    Iv total(p);
    for (const auto& x : F) {
      mpfr_add(total.lo.v, total.lo.v, x.lo.v, MPFR_RNDD);
      mpfr_add(total.hi.v, total.hi.v, x.hi.v, MPFR_RNDU);
    }
    Mp width(p);
    mpfr_sub(width.v, total.hi.v, total.lo.v, MPFR_RNDU);
    mpfr_div(width.v, width.v, total.lo.v, MPFR_RNDU);
    const double rel = mpfr_get_d(width.v, MPFR_RNDU);
    if (!(rel <= std::pow(10.0, -opts.min_digits))) continue;

    r.a = a;
    r.n = n;
    r.precision_bits = static_cast<int>(p);
    r.relative_width = rel;
    r.lower = to_rational(total.lo.v);
    r.upper = to_rational(total.hi.v);
    r.log_value = log_of(total.lo.v);
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Re", opts.min_digits + 4, total.lo.v);
    r.value = s;
    mpfr_free_str(s);
    const double log_nfact = std::lgamma(n + 1.0);
    const double log_r0 = n + 3.0 * n * std::log(static_cast<double>(n));
    r.delta1 = n >= 2 ? -r.log_value / log_nfact - 3.0 * a : 0.0;
    r.delta2 = -r.log_value / log_r0 - a;
    return r;
  }
  throw Error(ErrorCode::PrecisionBudgetExceeded, "interval did not reach the requested digits");
}

BigRational ladder_sum_brute(double a, int n, const LadderSumOptions& opts, std::uint64_t max_points) {
  if (n < 2) throw Error(ErrorCode::ConfigInvalid, "ladder sum needs n >= 2");
  const Windows w = windows(a, opts.k0);
  const auto [first, last] = sum_range(n, opts);
  std::uint64_t points = 1;
  for (int l = first; l <= last; ++l) {
    points *= w.hi(l) - w.lo(l) + 1;
    if (points > max_points) throw Error(ErrorCode::CapExceeded, "window grid too large for brute force");
  }
  std::vector<std::uint64_t> m;
  for (int l = first; l <= last; ++l) m.push_back(w.lo(l));
  BigRational sum = 0;
  while (true) {
    BigInt num = 1;
    std::uint64_t pow2 = 0;
    for (std::size_t j = 0; j + 1 < m.size(); ++j) {
      num *= binomial(m[j + 1] + m[j] - 1, m[j] - 1);
      pow2 += m[j + 1] + m[j];
    }
    sum += BigRational(num, BigInt(1) << static_cast<unsigned>(pow2));
    std::size_t j = 0;
    for (; j < m.size(); ++j) {
      const int l = first + static_cast<int>(j);
      if (m[j] < w.hi(l)) {
        ++m[j];
        break;
      }
      m[j] = w.lo(l);
    }
    if (j == m.size()) break;
  }
  return sum;
}

SuccessBand success_probability_band(double a, int n, double c, double c_prime) {
  if (!(c > 0.0 && c <= c_prime)) throw Error(ErrorCode::ConfigInvalid, "need 0 < c <= c'");
  if (n < 2) throw Error(ErrorCode::ConfigInvalid, "n must be at least 2");
  const auto s = ladder_sum(a, n);
  const double ln = std::log(static_cast<double>(n));
  return {std::exp(s.log_value + std::log(c / ln)), std::exp(s.log_value + std::log(c_prime / ln)), s.log_value};
}

SuccessBand success_probability_band(double a, int n, const TopFactors& t) {
  const double lo = t.open_lo * t.enter_lo * t.escape_lo, hi = t.open_hi * t.enter_hi * t.escape_hi;
  if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "top factors must be ordered probabilities");
  const auto s = ladder_sum(a, n);
  return {0.25 * lo * std::exp(s.log_value), 0.25 * hi * std::exp(s.log_value), s.log_value};
}

// ---- Paley-Zygmund ----------------------------------------------------------

PaleyZygmund paley_zygmund_bound(double mean, double second_moment, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorCode::ConfigInvalid, "lambda must lie in (0, 1)");
  if (mean == 0.0) throw Error(ErrorCode::DegenerateW, "E W = 0");
  if (!(second_moment > 0.0)) throw Error(ErrorCode::ConfigInvalid, "second moment must be positive");
  PaleyZygmund pz;
  pz.bound = (1.0 - lambda) * (1.0 - lambda) * mean * mean / second_moment;
  return pz;
}

PaleyZygmund paley_zygmund_bound(const std::vector<double>& w, double lambda) {
  if (w.empty()) throw Error(ErrorCode::InsufficientSamples, "no samples");
  double m1 = 0.0, m2 = 0.0;
  for (double x : w) {
    if (x < 0.0) throw Error(ErrorCode::ConfigInvalid, "W must be nonnegative");
    m1 += x;
    m2 += x * x;
  }
  const double N = static_cast<double>(w.size());
  m1 /= N;
  m2 /= N;
  auto pz = paley_zygmund_bound(m1, m2, lambda);
  double hit = 0.0;
  for (double x : w) hit += x >= lambda * m1;
  pz.empirical = hit / N;
  pz.sigma = std::sqrt(pz.empirical * (1.0 - pz.empirical) / N);
  pz.consistent = pz.empirical >= pz.bound - 3.0 * pz.sigma;
  return pz;
}

}  // namespace lwb::history
