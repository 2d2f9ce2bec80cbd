#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "irrl/kernels.hpp"

using namespace irrl;

namespace {

std::vector<double> series(std::size_t n) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  double x = 0;
  for (auto& y : v) y = x = 0.95 * x + d(g);
  return v;
}

struct Faces {
  std::vector<double> x, y;
  kernels::FvStencil s;
};

Faces stencil(std::size_t n) {
  Faces f{std::vector<double>(n * n, 1.3), std::vector<double>(n * n, 0.7), {}};
  f.s.dims = 2;
  f.s.n = n;
  f.s.h = 2 * M_PI / static_cast<double>(n);
  f.s.face[0] = f.x;
  f.s.face[1] = f.y;
  return f;
}

void BM_autocov_serial(benchmark::State& st) {
  const auto x = series(static_cast<std::size_t>(st.range(0)));
  std::vector<double> out(256);
  for (auto _ : st) {
    kernels::serial::autocovariance(x, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_autocov_omp(benchmark::State& st) {
  const auto x = series(static_cast<std::size_t>(st.range(0)));
  std::vector<double> out(256);
  for (auto _ : st) {
    kernels::omp::autocovariance(x, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_autocov_fft(benchmark::State& st) {
  const auto x = series(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::autocovariance_fft(x, 0.0, 255));
}

void BM_fv_serial(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto s = stencil(n);
  const auto u = series(n * n);
  std::vector<double> out(n * n);
  for (auto _ : st) {
    kernels::serial::fv_apply(s.s, u, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_fv_omp(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto s = stencil(n);
  const auto u = series(n * n);
  std::vector<double> out(n * n);
  for (auto _ : st) {
    kernels::omp::fv_apply(s.s, u, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_autocov_serial)->Arg(1 << 16)->Arg(1 << 18);
BENCHMARK(BM_autocov_omp)->Arg(1 << 16)->Arg(1 << 18);
BENCHMARK(BM_autocov_fft)->Arg(1 << 16)->Arg(1 << 18);
BENCHMARK(BM_fv_serial)->Arg(128)->Arg(512);
BENCHMARK(BM_fv_omp)->Arg(128)->Arg(512);

BENCHMARK_MAIN();
