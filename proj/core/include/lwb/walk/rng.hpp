#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lwb::walk {

// Named seeded stream. The engine is std::mt19937_64 seeded through
// std::seed_seq from (seed, index, fnv1a(name)), so a stream is fixed by its
// key on every conforming standard library.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index, std::string_view name = "");

  std::uint64_t next() { return eng_(); }
  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  // Uniform integer on [0,n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_;
  std::uint64_t index_;
};

std::uint64_t fnv1a(std::string_view s);

}  // namespace lwb::walk
