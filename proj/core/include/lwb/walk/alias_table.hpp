#pragma once

#include <cstdint>
#include <vector>

#include "lwb/walk/jump_law.hpp"
#include "lwb/walk/rng.hpp"

namespace lwb::walk {

// Vose alias table over a finite weight vector.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& weights);

  std::size_t size() const { return prob_.size(); }
  std::size_t sample(Stream& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

// Draws steps from a jump law. Immutable after construction, shareable.
class StepSampler {
 public:
  explicit StepSampler(const JumpLaw& law);

  Point sample(Stream& rng) const;
  const JumpLaw& law() const { return law_; }

 private:
  Point sample_tail(Stream& rng) const;

  JumpLaw law_;
  std::vector<Point> outcomes_;  // core offsets; index size() means the tail
  AliasTable table_;
  AliasTable rings_;
  double tail_exponent_ = 6.0;
  double tail_rmin_ = 1.0;
  double tail_rmax_ = 0.0;
};

}  // namespace lwb::walk
