// Serial reference kernels against their OpenMP twins on identical inputs.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "minorant/kernels.hpp"

namespace k = minorant::kernels;

namespace {

struct Grid {
  int n;
  std::vector<std::uint8_t> mask;
  std::vector<double> u;
  std::vector<double> aux;

  explicit Grid(int n_) : n(n_), mask(static_cast<std::size_t>(n_) * n_, 0), u(mask.size()), aux(mask.size()) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int j = 1; j + 1 < n; ++j)
      for (int i = 1; i + 1 < n; ++i) mask[static_cast<std::size_t>(j) * n + i] = 1;
    for (auto& v : u) v = d(rng);
    for (auto& v : aux) v = d(rng);
  }
  k::GridView view() const { return {n, n, mask}; }
};

template <auto Fn>
void BM_stencil(benchmark::State& st) {
  Grid g(static_cast<int>(st.range(0)));
  std::vector<double> out(g.u.size());
  for (auto _ : st) {
    Fn(g.view(), g.u, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Fn>
void BM_obstacle(benchmark::State& st) {
  Grid g(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto h = g.u;
    benchmark::DoNotOptimize(Fn(g.view(), h, g.aux));
  }
}

template <auto Fn>
void BM_pivot(benchmark::State& st) {
  const auto rows = static_cast<std::size_t>(st.range(0));
  const std::size_t stride = 2 * rows;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.5, 1.5);
  std::vector<double> base(rows * stride);
  for (auto& v : base) v = d(rng);
  std::vector<std::size_t> nz(stride);
  for (std::size_t c = 0; c < stride; ++c) nz[c] = c;
  for (auto _ : st) {
    st.PauseTiming();
    auto t = base;
    st.ResumeTiming();
    Fn(t.data(), rows, stride, rows / 2, 3, nz);
    benchmark::DoNotOptimize(t.data());
  }
}

template <auto Fn>
void BM_lipschitz(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> r(n), px(n), py(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = d(rng);
    px[i] = d(rng);
    py[i] = d(rng);
  }
  for (auto _ : st) {
    Fn(r, px, py, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_stencil<k::serial::stencil_defect>)->Name("stencil/serial")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_stencil<k::parallel::stencil_defect>)->Name("stencil/parallel")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_obstacle<k::serial::obstacle_sweep>)->Name("obstacle/serial")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_obstacle<k::parallel::obstacle_sweep>)->Name("obstacle/parallel")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_pivot<k::serial::pivot_rows>)->Name("pivot/serial")->Arg(100)->Arg(400)->Arg(1200);
BENCHMARK(BM_pivot<k::parallel::pivot_rows>)->Name("pivot/parallel")->Arg(100)->Arg(400)->Arg(1200);
BENCHMARK(BM_lipschitz<k::serial::lipschitz_envelope>)->Name("lipschitz/serial")->Arg(400)->Arg(2000);
BENCHMARK(BM_lipschitz<k::parallel::lipschitz_envelope>)->Name("lipschitz/parallel")->Arg(400)->Arg(2000);

BENCHMARK_MAIN();
