#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp` with identical
// results (bitwise for the elementwise/stencil kernels; the reductions sum in
// the same per-output order).

#include <cstddef>
#include <span>
#include <vector>

namespace irrl::kernels {

/// Face densities and spacing of a second-order finite-volume stencil on an
/// n^dims periodic grid (dims 1 or 2). face[k][i] sits between node i and
/// node i + e_k.
struct FvStencil {
  int dims = 1;
  std::size_t n = 0;
  double h = 1.0;
  std::span<const double> face[2];
};

namespace serial {

/// out[k] = (1/N) sum_{i < N-k} (x_i - mean)(x_{i+k} - mean), k = 0..out.size()-1.
void autocovariance(std::span<const double> x, double mean, std::span<double> out);

/// Means of m contiguous blocks of length floor(x.size()/m); the remainder is dropped.
void block_means(std::span<const double> x, std::span<double> out);

/// out = sum_k G_k^T diag(face_k) G_k u  (i.e. -div(p grad u)).
void fv_apply(const FvStencil& s, std::span<const double> u, std::span<double> out);

/// out_i = a_i * b_i.
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);

}  // namespace serial

namespace omp {

void autocovariance(std::span<const double> x, double mean, std::span<double> out);
void block_means(std::span<const double> x, std::span<double> out);
void fv_apply(const FvStencil& s, std::span<const double> u, std::span<double> out);
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);

}  // namespace omp

/// Same quantity as serial::autocovariance for lags 0..max_lag, in O(N log N) via FFT.
std::vector<double> autocovariance_fft(std::span<const double> x, double mean,
                                       std::size_t max_lag);

}  // namespace irrl::kernels
