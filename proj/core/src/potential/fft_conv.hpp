#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lwb/walk/jump_law.hpp"

namespace lwb::potential::detail {

// Convolution of a w x h box signal with the jump kernel, output on the same
// box. Circular FFT of size >= 2w-1 by 2h-1 so no wrap-around reaches the box.
class BoxConvolver {
 public:
  BoxConvolver(const walk::JumpLaw& law, std::int64_t w, std::int64_t h);
  // Kernel given explicitly on offsets |dx| < w, |dy| < h via callback.
  template <class F>
  BoxConvolver(std::int64_t w, std::int64_t h, F kernel) : w_(w), h_(h) {
    init_sizes();
    std::vector<double> k(static_cast<std::size_t>(lx_ * ly_), 0.0);
    for (std::int64_t dy = -(h - 1); dy <= h - 1; ++dy)
      for (std::int64_t dx = -(w - 1); dx <= w - 1; ++dx)
        k[static_cast<std::size_t>(((dy + ly_) % ly_) * lx_ + (dx + lx_) % lx_)] = kernel(dx, dy);
    set_kernel(k);
  }
  ~BoxConvolver();
  BoxConvolver(const BoxConvolver&) = delete;
  BoxConvolver& operator=(const BoxConvolver&) = delete;

  // in/out are row-major w x h (index y*w + x). Not thread safe.
  void apply(const std::vector<double>& in, std::vector<double>& out) const;

 private:
  void init_sizes();
  void set_kernel(const std::vector<double>& k);

  std::int64_t w_, h_, lx_ = 0, ly_ = 0;
  std::vector<std::complex<double>> kf_;
  mutable std::vector<double> rbuf_;
  mutable std::vector<std::complex<double>> cbuf_;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

std::int64_t fft_size(std::int64_t n);

}  // namespace lwb::potential::detail
