#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "prd/demand.hpp"
#include "prd/diagnostics.hpp"
#include "prd/equilibrium.hpp"
#include "prd/error.hpp"
#include "prd/lazy_exchange.hpp"
#include "prd/pr_fisher.hpp"

using namespace prd;
using namespace prd::testing;

namespace {

template <class Fn>
Errc code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InvalidArgument;
}

MarketSpec cd_two_by_two() {
    return make_fisher_market({make_cobb_douglas(vec({0.5, 0.5})), make_cobb_douglas(vec({0.25, 0.75}))},
                              {1.0, 1.0});
}

}  // namespace

TEST_CASE("KL divergence values") {
    CHECK(kl_divergence(vec({0.3, 0.7}), vec({0.3, 0.7})) == 0.0);
    CHECK(kl_divergence(vec({1, 1}), vec({2, 2})) == doctest::Approx(-1.3862943611198906).epsilon(1e-15));
    CHECK(kl_divergence(vec({0.75, 1.25}), vec({1, 1})) ==
          doctest::Approx(0.75 * std::log(0.75) + 1.25 * std::log(1.25)).epsilon(1e-15));
    CHECK(kl_divergence(vec({0.75, 1.25}), vec({1, 1})) == doctest::Approx(0.0632).epsilon(1e-4));

    BidMatrix star(1, 2), b0(1, 2);
    star << 0.5, 0.5;
    b0 << 0.25, 0.75;
    CHECK(fisher_potential(star, b0) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-15));
    CHECK(fisher_potential(star, b0) == doctest::Approx(0.143841).epsilon(1e-6));
    CHECK(fisher_potential(star, star) == 0.0);

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        Vector a = random_positive(rng, 5), b = random_positive(rng, 5);
        b *= a.sum() / b.sum();
        CHECK(kl_divergence(a, b) >= -1e-12);
    }
}

TEST_CASE("potential on the Cobb-Douglas 2x2") {
    const MarketSpec market = cd_two_by_two();
    const EquilibriumResult eq = solve_fisher_eq(market);
    BidMatrix b0(2, 2);
    b0 << 0.9, 0.1, 0.3, 0.7;
    const DynamicsTrace trace = run_fisher(market, b0, StopRule(10, 0.0));
    const DiagnosticsReport r = check_potential_decrease(trace, eq, 1e-12);
    CHECK(r.monotone_violations.empty());
    CHECK(r.potential_series[0] > 0.0);
    CHECK(std::abs(r.potential_series[1]) <= 1e-15);

    const DynamicsTrace thinned = run_fisher(market, b0, StopRule(30, 0.0), 10);
    CHECK(code_of([&] { check_potential_decrease(thinned, eq, 1e-9); }) == Errc::NonConsecutiveTrace);
    CHECK(code_of([&] { check_avg_price_rate(thinned, eq, b0); }) == Errc::NonConsecutiveTrace);
}

TEST_CASE("average price bound") {
    // At the equilibrium both sides vanish.
    const MarketSpec market = cd_two_by_two();
    const EquilibriumResult eq = solve_fisher_eq(market);
    const DynamicsTrace still = run_fisher(market, eq.b_star, StopRule(5, 0.0));
    for (const RateRow& row : check_avg_price_rate(still, eq, eq.b_star)) {
        CHECK(std::abs(row.lhs) <= 1e-15);
        CHECK(row.rhs == 0.0);
    }

    std::mt19937_64 rng(2);
    for (Fam fam : {Fam::Ces, Fam::SeparablePower}) {
        const MarketSpec m = random_fisher(rng, fam, 3, 4);
        const EquilibriumResult e = solve_fisher_eq(m);
        REQUIRE(e.converged);
        const BidMatrix b0 = default_initial_bids(m);
        const DynamicsTrace trace = run_fisher(m, b0, StopRule(1000, 0.0));
        const std::vector<RateRow> rows = check_avg_price_rate(trace, e, b0);
        REQUIRE(rows.size() == 999);
        CHECK(rows.front().horizon == 1);
        const double kl0 = fisher_potential(e.b_star, b0);
        for (const RateRow& row : rows) {
            CHECK(row.lhs <= row.rhs + 1e-9);
            CHECK(std::abs(row.rhs * static_cast<double>(row.horizon) - kl0) <= 1e-12 * kl0);
        }
    }
}

TEST_CASE("lemma gap") {
    std::mt19937_64 rng(3);
    for (Fam fam : kAllFamilies) {
        const UtilitySpec u = random_utility(rng, fam, 3);
        const Vector p = random_positive(rng, 3);
        CHECK(lemma_gap(u, p, p, 1.3) == 0.0);
    }

    // Cobb-Douglas with q = c p: x(q) = x(p) / c, so the gap is e (1 - 1/c - log c).
    for (int trial = 0; trial < 50; ++trial) {
        const UtilitySpec u = random_utility(rng, Fam::CobbDouglas, 4);
        const Vector p = random_positive(rng, 4);
        const double e = log_uniform(rng, 0.1, 10.0);
        const double c = log_uniform(rng, 0.2, 5.0);
        const double expected = e * (1.0 - 1.0 / c - std::log(c));
        CHECK(lemma_gap(u, p, c * p, e) == doctest::Approx(expected).epsilon(1e-12).scale(e));
        CHECK(expected <= 0.0);
    }

    for (Fam fam : kAllFamilies) {
        for (int trial = 0; trial < 400; ++trial) {
            const UtilitySpec u = random_utility(rng, fam, 4);
            const Vector p = random_positive(rng, 4);
            const Vector q = random_positive(rng, 4);
            CHECK(lemma_gap(u, p, q, log_uniform(rng, 0.1, 10.0)) <= 1e-9);
        }
    }
}

TEST_CASE("personal-price check") {
    std::mt19937_64 rng(4);
    for (Fam fam : kAllFamilies) {
        const MarketSpec market = random_fisher(rng, fam, 3, 3);
        const EquilibriumResult eq = solve_fisher_eq(market);
        REQUIRE(eq.converged);
        CHECK(std::abs(lemma_33_check(market, eq, eq.x_star)) <= 1e-9);

        const DynamicsTrace trace = run_fisher(market, default_initial_bids(market), StopRule(200, 0.0));
        for (const TraceRecord& rec : trace.records) CHECK(lemma_33_check(market, eq, rec.alloc) <= 1e-9);

        Matrix over = eq.x_star;
        over(0, 0) += 0.01;
        CHECK(code_of([&] { lemma_33_check(market, eq, over); }) == Errc::InfeasibleAllocation);
    }
}

TEST_CASE("Fisher diagnostics bundle") {
    std::mt19937_64 rng(5);
    const MarketSpec market = random_fisher(rng, Fam::Ces, 3, 4);
    const EquilibriumResult eq = solve_fisher_eq(market);
    const DynamicsTrace trace = run_fisher(market, default_initial_bids(market), StopRule(5000, 0.0));
    const DiagnosticsReport r = fisher_diagnostics(market, trace, eq);
    CHECK(r.pass);
    CHECK(r.monotone_violations.empty());
    CHECK(r.rate_violations.empty());
    CHECK(r.lemma_gap_min >= -1e-9);
    CHECK(r.potential_series.size() == trace.records.size());
    CHECK(r.avg_price_bound.size() == 4999);
}

TEST_CASE("exchange potential") {
    const MarketSpec pair = make_exchange_market(
        {make_cobb_douglas(vec({0.5, 0.5})), make_cobb_douglas(vec({0.5, 0.5}))}, {{0}, {1}}, {0.5, 0.5});
    const EquilibriumResult eq = solve_exchange_eq(pair);
    const LazyEquilibrium star = to_lazy_equilibrium(pair, eq.x_star, eq.p_star);
    CHECK(max_abs(star.budgets, vec({0.5, 0.5})) <= 1e-15);
    CHECK(max_abs(star.spend, vec({0.25, 0.25})) <= 1e-15);
    CHECK(exchange_potential(star.bids, star.spend, star) == 0.0);

    // Hand value: bids off by a factor 2 and spend off by a factor 2 on agent 0.
    BidMatrix b = star.bids;
    b.row(0) *= 2.0;
    Vector s = star.spend;
    s[0] *= 2.0;
    const double expected = 2 * 0.125 * std::log(0.5) + (0.5 / 0.5) * 0.25 * std::log(0.5);
    CHECK(exchange_potential(b, s, star) == doctest::Approx(expected).epsilon(1e-15));

    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 6; ++trial) {
        const MarketSpec market = random_exchange(rng, kAllFamilies[trial % 3], 3, 4, 0.3 + 0.1 * trial);
        const EquilibriumResult e = solve_exchange_eq(market);
        REQUIRE(e.converged);
        const LazyEquilibrium ls = to_lazy_equilibrium(market, e.x_star, e.p_star);
        const DynamicsTrace trace = run_exchange(market, default_initial_exchange(market), StopRule(2000, 0.0));
        const DiagnosticsReport r = exchange_diagnostics(market, trace, ls);
        CHECK(r.pass);
        CHECK(r.monotone_violations.empty());
        CHECK(r.potential_series.front() > r.potential_series.back());
    }
}
