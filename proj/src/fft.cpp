#include "irrl/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "irrl/errors.hpp"

namespace irrl {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

GridFft::GridFft(int dims, std::size_t n) : dims_(dims), n_(n) {
  if (dims != 1 && dims != 2) throw ParameterError("GridFft supports 1 or 2 dimensions");
  if (n < 2) throw ParameterError("grid size must be at least 2");
  size_ = dims == 1 ? n : n * n;
  std::lock_guard lock(planner_mutex());
  buf_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * size_));
  if (!buf_) throw NumericError("fftw_malloc failed", 0);
  const int ni = static_cast<int>(n);
  if (dims == 1) {
    fwd_ = fftw_plan_dft_1d(ni, as_fftw(buf_), as_fftw(buf_), FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_1d(ni, as_fftw(buf_), as_fftw(buf_), FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    fwd_ = fftw_plan_dft_2d(ni, ni, as_fftw(buf_), as_fftw(buf_), FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(ni, ni, as_fftw(buf_), as_fftw(buf_), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
}

void GridFft::release() noexcept {
  if (!buf_) return;
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(buf_);
  buf_ = nullptr;
}

GridFft::~GridFft() { release(); }

GridFft::GridFft(GridFft&& o) noexcept
    : dims_(o.dims_), n_(o.n_), size_(o.size_), buf_(o.buf_), fwd_(o.fwd_), inv_(o.inv_) {
  o.buf_ = nullptr;
}

GridFft& GridFft::operator=(GridFft&& o) noexcept {
  if (this != &o) {
    release();
    dims_ = o.dims_;
    n_ = o.n_;
    size_ = o.size_;
    buf_ = o.buf_;
    fwd_ = o.fwd_;
    inv_ = o.inv_;
    o.buf_ = nullptr;
  }
  return *this;
}

void GridFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  for (std::size_t i = 0; i < size_; ++i) buf_[i] = {in[i], 0.0};
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::copy(buf_, buf_ + size_, out.begin());
}

void GridFft::forward(std::span<const std::complex<double>> in,
                      std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(size_), buf_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::copy(buf_, buf_ + size_, out.begin());
}

void GridFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(size_), buf_);
  fftw_execute(static_cast<fftw_plan>(inv_));
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = buf_[i].real() * scale;
}

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw ParameterError("transform length must be at least 2");
  std::lock_guard lock(planner_mutex());
  real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  spec_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
  if (!real_ || !spec_) throw NumericError("fftw_malloc failed", 0);
  const int ni = static_cast<int>(n);
  fwd_ = fftw_plan_dft_r2c_1d(ni, real_, as_fftw(spec_), FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_c2r_1d(ni, as_fftw(spec_), real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(n_), real_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::copy(spec_, spec_ + n_ / 2 + 1, out.begin());
}

void RealFft::backward(std::span<const std::complex<double>> in, std::span<double> out) {
  // c2r destroys its input, so it always works on the private buffer.
  std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(n_ / 2 + 1), spec_);
  fftw_execute(static_cast<fftw_plan>(bwd_));
  std::copy(real_, real_ + n_, out.begin());
}

}  // namespace irrl
