#include <benchmark/benchmark.h>

#include "sigma_lab/arith.hpp"
#include "sigma_lab/congruence.hpp"
#include "sigma_lab/iterate.hpp"
#include "sigma_lab/multiperfect.hpp"

using namespace sigma_lab;

static void BM_FactorSemiprime(benchmark::State& state) {
    const Integer n("998244359987710471");  // 998244353 * 1000000007
    for (auto _ : state) benchmark::DoNotOptimize(factor(n));
}
BENCHMARK(BM_FactorSemiprime);

static void BM_FactorFiveTimesPerfect(benchmark::State& state) {
    const Integer n("13188979363639752997731839211623940096");
    for (auto _ : state) benchmark::DoNotOptimize(factor(n));
}
BENCHMARK(BM_FactorFiveTimesPerfect);

static void BM_IterateSigma(benchmark::State& state) {
    const auto k = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(iterate_sigma(Integer(67), k));
}
BENCHMARK(BM_IterateSigma)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_SmallestK(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(smallest_k_divisibility(Integer(389), 300));
}
BENCHMARK(BM_SmallestK)->Unit(benchmark::kMillisecond);

static void BM_MultiperfectScan(benchmark::State& state) {
    const auto limit = static_cast<std::uint64_t>(state.range(0));
    const auto jobs = static_cast<unsigned>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(multiperfect_scan(limit, jobs));
}
BENCHMARK(BM_MultiperfectScan)
    ->Args({1'000'000, 1})
    ->Args({1'000'000, 4})
    ->Unit(benchmark::kMillisecond);

static void BM_PowerSumResidue(benchmark::State& state) {
    for (auto _ : state) {
        for (std::uint32_t k = 1; k <= 30; ++k) benchmark::DoNotOptimize(powersum_residue(Integer(47), 6, k));
    }
}
BENCHMARK(BM_PowerSumResidue);
BENCHMARK_MAIN();
