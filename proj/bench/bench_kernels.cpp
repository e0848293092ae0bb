#include <benchmark/benchmark.h>

#include <vector>

#include "ksphere/kernels.hpp"
#include "ksphere/lattice_sphere.hpp"

using namespace ksphere;

namespace {

void BM_histogram_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::power_histogram_serial(2, 5, st.range(0)));
}
void BM_histogram_omp(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::power_histogram_omp(2, 5, st.range(0)));
}

std::vector<std::int64_t> freq_grid(int d, std::int64_t M) {
  std::vector<std::int64_t> out;
  std::int64_t total = 1;
  for (int i = 0; i < d; ++i) total *= M;
  for (std::int64_t j = 0; j < total; ++j) {
    std::int64_t rest = j;
    for (int i = 0; i < d; ++i) {
      out.push_back(rest % M);
      rest /= M;
    }
  }
  return out;
}

void BM_fourier_serial(benchmark::State& st) {
  const auto pts = enumerate_points({2, 4, st.range(0)});
  const auto freqs = freq_grid(4, 8);
  std::vector<Complex> out(freqs.size() / 4);
  for (auto _ : st) {
    kernels::lattice_fourier_serial(pts, freqs, 8, out);
    benchmark::DoNotOptimize(out.data());
  }
}
void BM_fourier_omp(benchmark::State& st) {
  const auto pts = enumerate_points({2, 4, st.range(0)});
  const auto freqs = freq_grid(4, 8);
  std::vector<Complex> out(freqs.size() / 4);
  for (auto _ : st) {
    kernels::lattice_fourier_omp(pts, freqs, 8, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_gauss_profile_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::gauss_profile_serial(3, st.range(0)));
}
void BM_gauss_profile_omp(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::gauss_profile_omp(3, st.range(0)));
}

void BM_cyclic_average_serial(benchmark::State& st) {
  const std::vector<double> f(16 * 16 * 16, 1.0);
  const auto offs = enumerate_points({2, 3, st.range(0)});
  std::vector<double> out(f.size());
  for (auto _ : st) {
    kernels::cyclic_average_serial(f, 3, 16, offs, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}
void BM_cyclic_average_omp(benchmark::State& st) {
  const std::vector<double> f(16 * 16 * 16, 1.0);
  const auto offs = enumerate_points({2, 3, st.range(0)});
  std::vector<double> out(f.size());
  for (auto _ : st) {
    kernels::cyclic_average_omp(f, 3, 16, offs, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_histogram_serial)->Arg(400)->Arg(2000);
BENCHMARK(BM_histogram_omp)->Arg(400)->Arg(2000);
BENCHMARK(BM_fourier_serial)->Arg(25)->Arg(100);
BENCHMARK(BM_fourier_omp)->Arg(25)->Arg(100);
BENCHMARK(BM_gauss_profile_serial)->Arg(200)->Arg(500);
BENCHMARK(BM_gauss_profile_omp)->Arg(200)->Arg(500);
BENCHMARK(BM_cyclic_average_serial)->Arg(9)->Arg(49);
BENCHMARK(BM_cyclic_average_omp)->Arg(9)->Arg(49);

BENCHMARK_MAIN();
