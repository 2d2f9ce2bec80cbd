#include "irrl/kernels.hpp"

#include <algorithm>

#include "irrl/errors.hpp"

namespace irrl::kernels {

namespace {

inline double lag_sum(std::span<const double> x, double mean, std::size_t k) {
  const std::size_t n = x.size();
  double s = 0.0;
  for (std::size_t i = 0; i + k < n; ++i) s += (x[i] - mean) * (x[i + k] - mean);
  return s / static_cast<double>(n);
}

inline double block_mean(std::span<const double> x, std::size_t len, std::size_t j) {
  double s = 0.0;
  const double* p = x.data() + j * len;
  for (std::size_t i = 0; i < len; ++i) s += p[i];
  return s / static_cast<double>(len);
}

void check_blocks(std::span<const double> x, std::span<double> out) {
  if (out.empty()) throw ParameterError("block count must be positive");
  if (x.size() < out.size()) throw ParameterError("fewer samples than blocks");
}

// Row of the stencil result for node index idx on an n^dims grid.
inline double fv_node(const FvStencil& s, std::span<const double> u, std::size_t idx) {
  const std::size_t n = s.n;
  const double inv_h2 = 1.0 / (s.h * s.h);
  double acc = 0.0;
  if (s.dims == 1) {
    const std::size_t ip = idx + 1 == n ? 0 : idx + 1;
    const std::size_t im = idx == 0 ? n - 1 : idx - 1;
    acc = s.face[0][idx] * (u[idx] - u[ip]) + s.face[0][im] * (u[idx] - u[im]);
    return acc * inv_h2;
  }
  const std::size_t i = idx / n, j = idx % n;
  const std::size_t ip = (i + 1 == n ? 0 : i + 1) * n + j;
  const std::size_t im = (i == 0 ? n - 1 : i - 1) * n + j;
  const std::size_t jp = i * n + (j + 1 == n ? 0 : j + 1);
  const std::size_t jm = i * n + (j == 0 ? n - 1 : j - 1);
  acc += s.face[0][idx] * (u[idx] - u[ip]) + s.face[0][im] * (u[idx] - u[im]);
  acc += s.face[1][idx] * (u[idx] - u[jp]) + s.face[1][jm] * (u[idx] - u[jm]);
  return acc * inv_h2;
}

}  // namespace

namespace serial {

void autocovariance(std::span<const double> x, double mean, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = lag_sum(x, mean, k);
}

void block_means(std::span<const double> x, std::span<double> out) {
  check_blocks(x, out);
  const std::size_t len = x.size() / out.size();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = block_mean(x, len, j);
}

void fv_apply(const FvStencil& s, std::span<const double> u, std::span<double> out) {
  for (std::size_t idx = 0; idx < u.size(); ++idx) out[idx] = fv_node(s, u, idx);
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

}  // namespace serial

namespace omp {

void autocovariance(std::span<const double> x, double mean, std::span<double> out) {
  const auto m = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < m; ++k)
    out[static_cast<std::size_t>(k)] = lag_sum(x, mean, static_cast<std::size_t>(k));
}

void block_means(std::span<const double> x, std::span<double> out) {
  check_blocks(x, out);
  const std::size_t len = x.size() / out.size();
  const auto m = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < m; ++j)
    out[static_cast<std::size_t>(j)] = block_mean(x, len, static_cast<std::size_t>(j));
}

void fv_apply(const FvStencil& s, std::span<const double> u, std::span<double> out) {
  const auto total = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < total; ++idx)
    out[static_cast<std::size_t>(idx)] = fv_node(s, u, static_cast<std::size_t>(idx));
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = a[k] * b[k];
  }
}

}  // namespace omp

}  // namespace irrl::kernels

#include <bit>
#include <complex>

#include "irrl/fft.hpp"

namespace irrl::kernels {

std::vector<double> autocovariance_fft(std::span<const double> x, double mean,
                                       std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n == 0) throw ParameterError("empty series");
  max_lag = std::min(max_lag, n - 1);
  // Zero padding to >= n + max_lag makes the circular correlation linear for those lags.
  const std::size_t len = std::bit_ceil(std::max<std::size_t>(n + max_lag + 1, 2));
  std::vector<double> buf(len, 0.0);
  for (std::size_t i = 0; i < n; ++i) buf[i] = x[i] - mean;
  RealFft fft(len);
  std::vector<std::complex<double>> spec(len / 2 + 1);
  fft.forward(buf, spec);
  for (auto& c : spec) c = std::norm(c);
  fft.backward(spec, buf);
  std::vector<double> out(max_lag + 1);
  const double scale = 1.0 / (static_cast<double>(len) * static_cast<double>(n));
  for (std::size_t k = 0; k <= max_lag; ++k) out[k] = buf[k] * scale;
  return out;
}

}  // namespace irrl::kernels
