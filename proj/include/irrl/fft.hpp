#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace irrl {

/// Complex DFT on an n^dims periodic grid (dims 1 or 2), row-major.
/// forward: X_k = sum_j x_j e^{-i k.x_j}; inverse divides by n^dims.
/// One instance must not be used from two threads at once.
class GridFft {
 public:
  GridFft(int dims, std::size_t n);
  ~GridFft();
  GridFft(const GridFft&) = delete;
  GridFft& operator=(const GridFft&) = delete;
  GridFft(GridFft&& other) noexcept;
  GridFft& operator=(GridFft&& other) noexcept;

  int dims() const noexcept { return dims_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
  /// Real part of the normalized inverse transform.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  void release() noexcept;

  int dims_ = 0;
  std::size_t n_ = 0;
  std::size_t size_ = 0;
  std::complex<double>* buf_ = nullptr;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

/// Real-to-complex 1D transform of length n and its unnormalized inverse.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t n() const noexcept { return n_; }
  /// Input n reals, output n/2+1 coefficients.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Input n/2+1 coefficients, output n reals scaled by n.
  void backward(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  std::size_t n_;
  double* real_ = nullptr;
  std::complex<double>* spec_ = nullptr;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

/// Signed wavenumber of DFT index j on a length-n grid; the Nyquist index maps to -n/2.
inline long wavenumber(std::size_t j, std::size_t n) noexcept {
  const auto jj = static_cast<long>(j);
  const auto nn = static_cast<long>(n);
  return 2 * jj < nn ? jj : jj - nn;
}

}  // namespace irrl
