#include "fft_conv.hpp"

#include <mutex>

#include <fftw3.h>

namespace lwb::potential::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::int64_t fft_size(std::int64_t n) {
  for (std::int64_t m = std::max<std::int64_t>(n, 1);; ++m) {
    std::int64_t r = m;
    for (std::int64_t p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

BoxConvolver::BoxConvolver(const walk::JumpLaw& law, std::int64_t w, std::int64_t h) : w_(w), h_(h) {
  init_sizes();
  std::vector<double> k(static_cast<std::size_t>(lx_ * ly_), 0.0);
  if (law.finite_range()) {
    for (const auto& e : law.core()) {
      if (std::abs(e.offset.x) >= w || std::abs(e.offset.y) >= h) continue;
      k[static_cast<std::size_t>(((e.offset.y + ly_) % ly_) * lx_ + (e.offset.x + lx_) % lx_)] += e.p;
    }
  } else {
    for (std::int64_t dy = -(h - 1); dy <= h - 1; ++dy)
      for (std::int64_t dx = -(w - 1); dx <= w - 1; ++dx)
        k[static_cast<std::size_t>(((dy + ly_) % ly_) * lx_ + (dx + lx_) % lx_)] = law.prob({dx, dy});
  }
  set_kernel(k);
}

void BoxConvolver::init_sizes() {
  lx_ = fft_size(2 * w_ - 1);
  ly_ = fft_size(2 * h_ - 1);
  rbuf_.assign(static_cast<std::size_t>(lx_ * ly_), 0.0);
  cbuf_.assign(static_cast<std::size_t>(ly_ * (lx_ / 2 + 1)), {});
  std::lock_guard lock(planner_mutex());
  fwd_ = fftw_plan_dft_r2c_2d(static_cast<int>(ly_), static_cast<int>(lx_), rbuf_.data(),
                              reinterpret_cast<fftw_complex*>(cbuf_.data()), FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_2d(static_cast<int>(ly_), static_cast<int>(lx_),
                              reinterpret_cast<fftw_complex*>(cbuf_.data()), rbuf_.data(), FFTW_ESTIMATE);
}

void BoxConvolver::set_kernel(const std::vector<double>& k) {
  rbuf_ = k;
  fftw_execute(static_cast<fftw_plan>(fwd_));
  kf_ = cbuf_;
  const double scale = 1.0 / static_cast<double>(lx_ * ly_);
  for (auto& z : kf_) z *= scale;
}

BoxConvolver::~BoxConvolver() {
  std::lock_guard lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void BoxConvolver::apply(const std::vector<double>& in, std::vector<double>& out) const {
  std::fill(rbuf_.begin(), rbuf_.end(), 0.0);
  for (std::int64_t y = 0; y < h_; ++y)
    for (std::int64_t x = 0; x < w_; ++x)
      rbuf_[static_cast<std::size_t>(y * lx_ + x)] = in[static_cast<std::size_t>(y * w_ + x)];
  fftw_execute(static_cast<fftw_plan>(fwd_));
  for (std::size_t i = 0; i < cbuf_.size(); ++i) cbuf_[i] *= kf_[i];
  fftw_execute(static_cast<fftw_plan>(inv_));
  out.resize(static_cast<std::size_t>(w_ * h_));
  for (std::int64_t y = 0; y < h_; ++y)
    for (std::int64_t x = 0; x < w_; ++x)
      out[static_cast<std::size_t>(y * w_ + x)] = rbuf_[static_cast<std::size_t>(y * lx_ + x)];
}

}  // namespace lwb::potential::detail
