#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>

#include "lwb/walk/alias_table.hpp"
#include "lwb/walk/lattice.hpp"
#include "lwb/walk/rng.hpp"

namespace lwb::walk {

// Visit counts at times 0..total_steps inclusive, so the counts sum to
// total_steps + 1.
class LocalTimeField {
 public:
  void visit(Point p) {
    auto& c = counts_[p];
    ++c;
    if (c > max_) {
      max_ = c;
      argmax_ = p;
    }
  }

  std::uint32_t at(Point p) const {
    auto it = counts_.find(p);
    return it == counts_.end() ? 0 : it->second;
  }
  std::uint32_t max() const { return max_; }
  Point argmax() const { return argmax_; }
  std::size_t distinct_sites() const { return counts_.size(); }
  std::uint64_t total_visits() const;
  const std::unordered_map<Point, std::uint32_t, PointHash>& counts() const { return counts_; }

  std::uint64_t total_steps = 0;

 private:
  std::unordered_map<Point, std::uint32_t, PointHash> counts_;
  std::uint32_t max_ = 0;
  Point argmax_{};
};

struct RunOptions {
  bool record_local_time = false;
  std::uint64_t max_steps = std::uint64_t{1} << 34;
};

struct ExitResult {
  Point exit_point;
  std::uint64_t exit_time = 0;
  std::optional<LocalTimeField> local_time;
};

// Runs until the first i with X_i outside the disk. Throws MaxStepsExceeded.
ExitResult run_until_exit(Point start, const Disk& domain, const StepSampler& sampler, Stream& rng,
                          const RunOptions& opts = {});

}  // namespace lwb::walk
