#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "prd/diagnostics.hpp"
#include "prd/equilibrium.hpp"
#include "prd/error.hpp"
#include "prd/lazy_exchange.hpp"

using namespace prd;
using namespace prd::testing;

namespace {

MarketSpec symmetric_pair() {
    return make_exchange_market({make_cobb_douglas(vec({0.5, 0.5})), make_cobb_douglas(vec({0.5, 0.5}))}, {{0}, {1}},
                                {0.5, 0.5});
}

}  // namespace

TEST_CASE("default initial state") {
    const ExchangeState s = default_initial_exchange(symmetric_pair());
    CHECK(s.budgets == vec({0.5, 0.5}));
    CHECK(s.spend == vec({0.25, 0.25}));
    CHECK((s.bids.array() == 0.125).all());
    CHECK(s.iteration == 0);

    const MarketSpec solo = make_exchange_market({make_ces(vec({1, 2, 3}), 0.5)}, {{0, 1, 2}}, {0.3});
    CHECK(default_initial_exchange(solo).budgets == vec({1.0}));

    std::mt19937_64 rng(1);
    for (std::size_t n = 1; n < 8; ++n) {
        const MarketSpec market = random_exchange(rng, Fam::Ces, n, n + 2);
        CHECK(default_initial_exchange(market).budgets.sum() == doctest::Approx(1.0).epsilon(1e-16));
    }
}

TEST_CASE("a single agent keeps her whole balance") {
    std::mt19937_64 rng(2);
    for (Fam fam : kAllFamilies) {
        const MarketSpec solo = make_exchange_market({random_utility(rng, fam, 2)}, {{0, 1}}, {0.37});
        ExchangeState s = default_initial_exchange(solo);
        for (int t = 0; t < 20; ++t) {
            s = lazy_step(solo, s).next;
            CHECK(std::abs(s.budgets[0] - 1.0) <= 1e-15);
        }
    }
}

TEST_CASE("symmetric orbit is preserved exactly") {
    const MarketSpec market = symmetric_pair();
    ExchangeState s = default_initial_exchange(market);
    for (int t = 0; t < 50; ++t) {
        const ExchangeStep step = lazy_step(market, s);
        CHECK(step.next.budgets == vec({0.5, 0.5}));
        CHECK(step.prices[0] == step.prices[1]);
        CHECK(step.prices[0] == 0.5 * s.spend.sum());
        CHECK((step.alloc.array() == 0.5).all());
        s = step.next;
    }
    const DynamicsTrace trace = run_exchange(market, default_initial_exchange(market), StopRule(100, 1e-12));
    CHECK(trace.stop == StopReason::AllocationTolerance);
    CHECK(trace.final_record().iteration == 1);

    const DynamicsTrace one = run_exchange(market, default_initial_exchange(market), StopRule(1, 1e-12));
    CHECK(one.records.size() == 1);
    CHECK(one.stop == StopReason::MaxIters);
}

TEST_CASE("bookkeeping identities hold every round") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const MarketSpec market = random_exchange(rng, kAllFamilies[trial % 3], n, n + trial % 4, 0.2 + 0.05 * trial);
        const auto owners = good_owners(market);
        ExchangeState s = default_initial_exchange(market);
        for (int t = 0; t < 300; ++t) {
            const ExchangeStep step = lazy_step(market, s);
            CHECK(std::abs(step.next.budgets.sum() - s.budgets.sum()) <= 1e-14);
            Vector revenue = Vector::Zero(static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j < market.n_goods; ++j)
                revenue[static_cast<Eigen::Index>(owners[j])] += step.prices[static_cast<Eigen::Index>(j)];
            for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
                const double alpha = market.laziness[static_cast<std::size_t>(i)];
                const double expected = (1.0 - alpha) * s.budgets[i] + revenue[i];
                CHECK(std::abs(step.next.budgets[i] - expected) <= 1e-15);
                CHECK(std::abs(step.next.spend[i] - alpha * step.next.budgets[i]) <= 1e-16);
                CHECK(std::abs(step.next.bids.row(i).sum() - step.next.spend[i]) <= 1e-15);
            }
            CHECK((step.next.bids.array() > 0.0).all());
            s = step.next;
        }
    }
}

TEST_CASE("run_exchange requires unit money") {
    const MarketSpec market = symmetric_pair();
    ExchangeState s = default_initial_exchange(market);
    s.budgets *= 2.0;
    CHECK_THROWS_AS(run_exchange(market, s, StopRule(10, 0.0)), Error);

    const ExchangeState rescaled = exchange_state_from_budgets(market, vec({3.0, 1.0}));
    CHECK(max_abs(rescaled.budgets, vec({0.75, 0.25})) <= 1e-16);
    CHECK(max_abs(rescaled.bids.row(0).transpose(), vec({0.1875, 0.1875})) <= 1e-16);
}

TEST_CASE("CES exchange run lands on a verified equilibrium") {
    std::mt19937_64 rng(4);
    const MarketSpec market = random_exchange(rng, Fam::Ces, 3, 3);
    const DynamicsTrace trace = run_exchange(market, default_initial_exchange(market), StopRule(20000, 1e-12));
    const TraceRecord& last = trace.final_record();
    CHECK(verify_exchange_equilibrium(market, last.alloc, last.prices, 1e-4).pass());

    const EquilibriumResult eq = solve_exchange_eq(market);
    REQUIRE(eq.converged);
    CHECK(max_abs(last.alloc, eq.x_star) <= 1e-4);
}

TEST_CASE("transformed equilibrium is a fixed point") {
    std::mt19937_64 rng(5);
    for (Fam fam : kAllFamilies) {
        const MarketSpec market = random_exchange(rng, fam, 3, 5, 0.4);
        const EquilibriumResult eq = solve_exchange_eq(market);
        REQUIRE(eq.converged);
        const LazyEquilibrium star = to_lazy_equilibrium(market, eq.x_star, eq.p_star);
        CHECK(std::abs(star.budgets.sum() - 1.0) <= 1e-15);
        ExchangeState s = star.state();
        for (int t = 0; t < 5; ++t) {
            const ExchangeStep step = lazy_step(market, s);
            CHECK(max_abs(step.next.bids, star.bids) <= 1e-12);
            CHECK(max_abs(step.next.budgets, star.budgets) <= 1e-12);
            CHECK(max_abs(step.alloc, star.alloc) <= 1e-10);
            s = step.next;
        }
        CHECK(std::abs(exchange_potential(star.bids, star.spend, star)) <= 1e-15);
    }
}

TEST_CASE("invalid states") {
    const MarketSpec market = symmetric_pair();
    ExchangeState s = default_initial_exchange(market);
    s.bids(0, 1) = -1.0;
    CHECK_THROWS_AS(lazy_step(market, s), Error);
    const MarketSpec fisher = make_fisher_market({make_cobb_douglas(vec({0.5, 0.5}))}, {1.0});
    try {
        lazy_step(fisher, default_initial_exchange(market));
        FAIL("expected ModeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ModeMismatch);
    }
}
