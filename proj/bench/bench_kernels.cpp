// Serial reference vs OpenMP for the per-round kernels and a full Fisher round.
#include <benchmark/benchmark.h>

#include <random>

#include "prd/kernels.hpp"
#include "prd/pr_fisher.hpp"

using namespace prd;

namespace {

MarketSpec make_market(std::size_t n, std::size_t m, bool separable) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> w(0.1, 10.0), rho(0.2, 0.8), e(0.5, 2.0);
    std::vector<UtilitySpec> us;
    std::vector<double> budgets;
    for (std::size_t i = 0; i < n; ++i) {
        Vector a(static_cast<Eigen::Index>(m));
        for (auto& v : a) v = w(rng);
        if (separable) {
            Vector r(static_cast<Eigen::Index>(m));
            for (auto& v : r) v = rho(rng);
            us.push_back(make_separable_power(a, r));
        } else {
            us.push_back(make_ces(a, rho(rng)));
        }
        budgets.push_back(e(rng));
    }
    return make_fisher_market(std::move(us), std::move(budgets));
}

void round_bench(benchmark::State& state, Backend backend, bool separable) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = static_cast<std::size_t>(state.range(1));
    const MarketSpec market = make_market(n, m, separable);
    FisherState s{default_initial_bids(market), 0};
    for (auto _ : state) {
        FisherStep step = pr_step(market, s, backend);
        benchmark::DoNotOptimize(step.next.bids.data());
        s = std::move(step.next);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n * m));
}

void respond_bench(benchmark::State& state, Backend backend) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = static_cast<std::size_t>(state.range(1));
    const MarketSpec market = make_market(n, m, false);
    const Matrix bids = default_initial_bids(market);
    Vector prices;
    Matrix alloc, next;
    column_sums(Backend::Serial, bids, prices);
    proportional_allocation(Backend::Serial, bids, prices, alloc);
    const Vector spend = Eigen::Map<const Vector>(market.budgets.data(), static_cast<Eigen::Index>(n));
    for (auto _ : state) {
        respond(backend, market.utilities, alloc, spend, next);
        benchmark::DoNotOptimize(next.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n * m));
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int n : {64, 512, 4096}) b->Args({n, 32});
    b->Args({512, 256});
}

}  // namespace

BENCHMARK_CAPTURE(round_bench, ces_serial, Backend::Serial, false)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(round_bench, ces_openmp, Backend::OpenMP, false)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(round_bench, separable_serial, Backend::Serial, true)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(round_bench, separable_openmp, Backend::OpenMP, true)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(respond_bench, serial, Backend::Serial)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(respond_bench, openmp, Backend::OpenMP)->Apply(sizes)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
