#include "lwb/walk/alias_table.hpp"

#include "lwb/walk/presets.hpp"

#include <cmath>
#include <numeric>

namespace lwb::walk {

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  prob_.assign(n, 1.0);
  alias_.resize(n);
  std::iota(alias_.begin(), alias_.end(), 0u);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto l = small.back();
    small.pop_back();
    const auto g = large.back();
    prob_[l] = scaled[l];
    alias_[l] = g;
    scaled[g] = (scaled[g] + scaled[l]) - 1.0;
    if (scaled[g] < 1.0) {
      large.pop_back();
      small.push_back(g);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto g : large) prob_[g] = 1.0;
  for (auto l : small) prob_[l] = 1.0;
}

std::size_t AliasTable::sample(Stream& rng) const {
  // One 53-bit uniform: integer part picks the column, fraction is the coin.
  const double u = rng.uniform() * static_cast<double>(prob_.size());
  const auto col = static_cast<std::size_t>(u);
  return (u - static_cast<double>(col)) < prob_[col] ? col : alias_[col];
}

StepSampler::StepSampler(const JumpLaw& law) : law_(law) {
  std::vector<double> w;
  for (const auto& e : law_.core()) {
    outcomes_.push_back(e.offset);
    w.push_back(e.p);
  }
  if (law_.tail()) {
    const auto& t = *law_.tail();
    w.push_back(t.mass());
    const auto& ps = power_sums(t.exponent, t.r_max);
    rings_ = AliasTable(ps.ring_mass);
    tail_exponent_ = t.exponent;
    tail_rmin_ = t.r_min;
    tail_rmax_ = t.r_max;
  }
  table_ = AliasTable(w);
}

Point StepSampler::sample(Stream& rng) const {
  const std::size_t k = table_.sample(rng);
  if (k < outcomes_.size()) return outcomes_[k];
  return sample_tail(rng);
}

Point StepSampler::sample_tail(Stream& rng) const {
  // Ring j = floor(|x|) by alias, then rejection inside the ring against the
  // bound |x|^-e <= j^-e.
  const auto j = static_cast<std::int64_t>(rings_.sample(rng));
  const std::int64_t m = j + 1;
  const auto side = static_cast<std::uint64_t>(2 * m + 1);
  const double jj = static_cast<double>(j);
  for (;;) {
    const Point p{static_cast<std::int64_t>(rng.below(side)) - m,
                  static_cast<std::int64_t>(rng.below(side)) - m};
    const auto r2 = static_cast<double>(norm2(p));
    const double r = std::sqrt(r2);
    if (static_cast<std::int64_t>(std::floor(r)) != j) continue;
    if (r < tail_rmin_ || r > tail_rmax_) continue;
    const double ratio = std::pow(jj / r, tail_exponent_);
    if (rng.uniform() < ratio) return p;
  }
}

}  // namespace lwb::walk
