// Serial reference kernels against their OpenMP counterparts, plus the two
// library-level sweeps that use them.

#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "cqnls/dynamics.hpp"
#include "cqnls/kernels.hpp"
#include "cqnls/soliton_curve.hpp"

namespace k = cqnls::kernels;

namespace {

struct Data {
  std::vector<double> x, w, inv_r;
  std::vector<k::cplx> z, b;
  explicit Data(std::size_t n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(u(rng));
      w.push_back(u(rng));
      inv_r.push_back(1.0 / (0.0625 * (i + 1)));
      z.emplace_back(u(rng), u(rng));
      b.emplace_back(u(rng), u(rng));
    }
  }
};

template <double (*F)(std::span<const double>, std::span<const double>)>
void weighted_sum(benchmark::State& st) {
  Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(F(d.x, d.w));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <double (*F)(std::span<const k::cplx>, std::span<const double>)>
void norm_sq(benchmark::State& st) {
  Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(F(d.z, d.w));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <void (*F)(std::span<k::cplx>, std::span<const double>, double, std::span<const double>)>
void nonlinear_phase(benchmark::State& st) {
  Data d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    F(d.z, d.inv_r, 1e-3, {});
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void evolve_steps(benchmark::State& st) {
  static const auto q = cqnls::dynamics_soliton(cqnls::Frequency(3.0 / 32.0));
  const auto start = cqnls::perturbed_soliton(q, 0.0, cqnls::PerturbationKind::Amplitude);
  cqnls::EvolveConfig cfg;
  cfg.parallel = st.range(0) != 0;
  cfg.record_every = 1000;
  for (auto _ : st) benchmark::DoNotOptimize(cqnls::evolve(start, 1e-3, 200, cfg));
}

void trace(benchmark::State& st) {
  const auto samples = cqnls::default_samples(32, 0.01, 0.18);
  cqnls::CurveConfig cfg;
  cfg.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(cqnls::trace_points(samples, cfg));
}

}  // namespace

BENCHMARK(weighted_sum<k::serial::weighted_sum>)->Name("weighted_sum/serial")->Range(1 << 12, 1 << 20);
BENCHMARK(weighted_sum<k::parallel::weighted_sum>)->Name("weighted_sum/parallel")->Range(1 << 12, 1 << 20);
BENCHMARK(norm_sq<k::serial::weighted_norm_sq>)->Name("norm_sq/serial")->Range(1 << 12, 1 << 20);
BENCHMARK(norm_sq<k::parallel::weighted_norm_sq>)->Name("norm_sq/parallel")->Range(1 << 12, 1 << 20);
BENCHMARK(nonlinear_phase<k::serial::nonlinear_phase>)->Name("nonlinear_phase/serial")->Range(1 << 12, 1 << 20);
BENCHMARK(nonlinear_phase<k::parallel::nonlinear_phase>)->Name("nonlinear_phase/parallel")->Range(1 << 12, 1 << 20);
BENCHMARK(evolve_steps)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(trace)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
