// Serial reference against the OpenMP crossing kernel.
#include <benchmark/benchmark.h>

#include "wgd/layout.hpp"

using namespace wgd;

namespace {

Layout shuffle(std::size_t n)
{
    ShuffleSpec s;
    s.n_cards = n;
    return generate_shuffle(s, compact_board(s));
}

Layout random(std::size_t routes)
{
    RandomLayoutSpec spec;
    spec.routes = routes;
    spec.extent_mm = 100.0;
    return random_layout(42, spec);
}

void BM_ShuffleSerial(benchmark::State &state)
{
    const auto l = shuffle(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(count_crossings_serial(l.routes));
}

void BM_ShuffleParallel(benchmark::State &state)
{
    const auto l = shuffle(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(count_crossings(l.routes));
}

void BM_RandomSerial(benchmark::State &state)
{
    const auto l = random(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(count_crossings_serial(l.routes));
}

void BM_RandomParallel(benchmark::State &state)
{
    const auto l = random(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(count_crossings(l.routes));
}

} // namespace

BENCHMARK(BM_ShuffleSerial)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShuffleParallel)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RandomSerial)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RandomParallel)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
