#include <benchmark/benchmark.h>

#include "mtme/domains.hpp"
#include "mtme/engine.hpp"
#include "mtme/random.hpp"
#include "mtme/scheduler.hpp"
#include "mtme/tasks.hpp"
#include "mtme/variation.hpp"

using namespace mtme;

static void BM_ArmEvaluate(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const ArmDomain arm({d, {1.0, 1.0}});
    Rng rng(1);
    const auto g = random_unit_vector(d, rng);
    const TaskDescriptor t{0, {0.7, 0.4}};
    for (auto _ : state) benchmark::DoNotOptimize(arm.evaluate(g, t));
}
BENCHMARK(BM_ArmEvaluate)->Arg(10)->Arg(100)->Arg(1000);

static void BM_SyntheticEvaluate(benchmark::State& state) {
    const SyntheticDomain dom;
    Rng rng(2);
    const auto g = random_unit_vector(36, rng);
    const TaskDescriptor t{0, random_unit_vector(12, rng)};
    for (auto _ : state) benchmark::DoNotOptimize(dom.evaluate(g, t));
}
BENCHMARK(BM_SyntheticEvaluate);

static void BM_Tournament(benchmark::State& state) {
    const TaskSet tasks = generate_uniform(5000, 2, 3);
    const auto s = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(tournament_select_task(tasks[17], tasks, s, rng));
}
BENCHMARK(BM_Tournament)->Arg(1)->Arg(10)->Arg(100)->Arg(1000)->Arg(5000);

static void BM_IsoLine(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    Rng rng(4);
    const auto a = random_unit_vector(d, rng);
    const auto b = random_unit_vector(d, rng);
    for (auto _ : state) benchmark::DoNotOptimize(iso_line_variation(a, b, {}, rng));
}
BENCHMARK(BM_IsoLine)->Arg(10)->Arg(36)->Arg(1000);

static void BM_Cvt(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(generate_cvt(n, 2, 20 * n, 10, 5));
}
BENCHMARK(BM_Cvt)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_MtmeRun(benchmark::State& state) {
    const TaskSet tasks = generate_uniform(500, 2, 6);
    const ArmDomain arm({10, {1.0, 1.0}});
    RunConfig c;
    c.n_tasks = 500;
    c.d_task = 2;
    c.d_genome = 10;
    c.eval_budget = 20000;
    for (auto _ : state) benchmark::DoNotOptimize(run(c, tasks, arm).archive.filled_count());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.eval_budget));
}
BENCHMARK(BM_MtmeRun)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
