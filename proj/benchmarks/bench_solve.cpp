#include <benchmark/benchmark.h>

#include "fairdiv/cli.hpp"
#include "fairdiv/engine.hpp"
#include "fairdiv/oracles.hpp"

namespace {

using fairdiv::Instance;

void BM_solve_fixed_n(benchmark::State& state) {
    const auto agents = static_cast<std::size_t>(state.range(0));
    const auto goods = static_cast<std::size_t>(state.range(1));
    const Instance inst = fairdiv::cli::generate_instance(agents, goods, 1000, 42 + goods);
    fairdiv::engine::EngineOptions options;
    options.trace_cap = 0;
    std::size_t iterations = 0;
    for (auto _ : state) {
        const auto result = fairdiv::engine::solve(inst, options);
        iterations = 0;
        for (std::size_t it : result.iterations) iterations += it;
        benchmark::DoNotOptimize(result.solution.prices.data());
    }
    state.counters["find_solution_iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_solve_fixed_n)
    ->ArgsProduct({{3}, {10, 25, 50, 100}})
    ->Unit(benchmark::kMillisecond);

void BM_solve_with_audit(benchmark::State& state) {
    const Instance inst = fairdiv::cli::generate_instance(3, static_cast<std::size_t>(state.range(0)), 1000, 7);
    for (auto _ : state) {
        fairdiv::oracles::InvariantAuditor auditor;
        fairdiv::engine::EngineOptions options;
        options.observer = &auditor;
        options.trace_cap = 0;
        benchmark::DoNotOptimize(fairdiv::engine::solve(inst, options));
    }
}
BENCHMARK(BM_solve_with_audit)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_brute_force_po(benchmark::State& state) {
    const Instance inst = fairdiv::cli::generate_instance(4, static_cast<std::size_t>(state.range(0)), 10, 3);
    const auto result = fairdiv::engine::solve(inst);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fairdiv::oracles::brute_force_po(inst, result.solution.allocation));
    }
}
BENCHMARK(BM_brute_force_po)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
