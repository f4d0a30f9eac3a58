#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "prd/demand.hpp"
#include "prd/equilibrium.hpp"

using namespace prd;
using namespace prd::testing;

TEST_CASE("Cobb-Douglas closed form") {
    const MarketSpec market = make_fisher_market(
        {make_cobb_douglas(vec({0.5, 0.5})), make_cobb_douglas(vec({0.25, 0.75}))}, {1.0, 1.0});
    const EquilibriumResult eq = solve_fisher_eq(market);
    CHECK(eq.converged);
    CHECK(max_abs(eq.p_star, vec({0.75, 1.25})) <= 1e-15);
    Matrix x(2, 2);
    x << 2.0 / 3.0, 0.4, 1.0 / 3.0, 0.6;
    CHECK(max_abs(eq.x_star, x) <= 1e-15);
    CHECK((eq.x_star.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-15);
    CHECK(verify_fisher_equilibrium(market, eq.x_star, eq.p_star, 1e-10).pass());

    PriceVector bumped = eq.p_star;
    bumped[0] *= 1.1;
    const EquilibriumReport bad = verify_fisher_equilibrium(market, eq.x_star, bumped, 1e-10);
    CHECK_FALSE(bad.pass());
    CHECK_FALSE(bad.optimal);
}

TEST_CASE("single buyer gets everything") {
    std::mt19937_64 rng(1);
    for (Fam fam : kAllFamilies) {
        const MarketSpec one = make_fisher_market({random_utility(rng, fam, 1)}, {1.0});
        const EquilibriumResult eq = solve_fisher_eq(one);
        CHECK(eq.converged);
        CHECK(std::abs(eq.p_star[0] - 1.0) <= 1e-15);
        CHECK(std::abs(eq.x_star(0, 0) - 1.0) <= 1e-13);

        const UtilitySpec u = random_utility(rng, fam, 3);
        const MarketSpec solo = make_fisher_market({u}, {1.0});
        const EquilibriumResult s = solve_fisher_eq(solo);
        REQUIRE(s.converged);
        CHECK(max_abs(s.x_star.row(0).transpose(), Vector::Ones(3)) <= 1e-10);
        CHECK(max_abs(s.p_star, corresponding_price(u, Vector::Ones(3), 1.0)) <= 1e-10);
    }
}

TEST_CASE("random Fisher instances") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 12; ++trial) {
        const Fam fam = kAllFamilies[trial % 3];
        const MarketSpec market = random_fisher(rng, fam, 3, 4);
        const EquilibriumResult eq = solve_fisher_eq(market);
        REQUIRE(eq.converged);
        CHECK(eq.residuals.clearing <= 1e-10);
        CHECK(eq.residuals.optimality_gap <= 1e-10);
        CHECK(eq.residuals.budget_gap <= 1e-10);
        CHECK(verify_fisher_equilibrium(market, eq.x_star, eq.p_star, 1e-8).pass());
        CHECK(max_abs(eq.b_star.rowwise().sum(), Eigen::Map<const Vector>(market.budgets.data(), 3)) <= 1e-12);

        if (fam == Fam::Ces) {
            const Matrix uniform = Matrix::Constant(3, 4, 1.0 / 3.0);
            CHECK_FALSE(verify_fisher_equilibrium(market, uniform, eq.p_star, 1e-8).optimal);
        }
    }
}

TEST_CASE("verifier rejects nonpositive prices without throwing") {
    const MarketSpec market = make_fisher_market({make_cobb_douglas(vec({0.5, 0.5}))}, {1.0});
    const EquilibriumReport r = verify_fisher_equilibrium(market, Matrix::Ones(1, 2), vec({1.0, 0.0}), 1e-8);
    CHECK_FALSE(r.pass());
}

TEST_CASE("symmetric exchange pair") {
    const MarketSpec market = make_exchange_market(
        {make_cobb_douglas(vec({0.5, 0.5})), make_cobb_douglas(vec({0.5, 0.5}))}, {{0}, {1}}, {0.5, 0.5});
    const EquilibriumResult eq = solve_exchange_eq(market);
    CHECK(eq.converged);
    CHECK(max_abs(eq.p_star, vec({0.5, 0.5})) <= 1e-15);
    CHECK((eq.x_star.array() - 0.5).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("autarky") {
    const MarketSpec market = make_exchange_market({make_ces(vec({1, 2}), 0.5)}, {{0, 1}}, {0.5});
    const EquilibriumResult eq = solve_exchange_eq(market);
    CHECK(eq.converged);
    CHECK(max_abs(eq.x_star.row(0).transpose(), Vector::Ones(2)) <= 1e-10);
    CHECK(std::abs(eq.p_star.sum() - 1.0) <= 1e-14);
}

TEST_CASE("random exchange instances") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 9; ++trial) {
        const MarketSpec market = random_exchange(rng, kAllFamilies[trial % 3], 3, 3 + trial % 3);
        const EquilibriumResult eq = solve_exchange_eq(market);
        REQUIRE(eq.converged);
        CHECK(std::abs(eq.p_star.sum() - 1.0) <= 1e-14);
        const EquilibriumReport r = verify_exchange_equilibrium(market, eq.x_star, eq.p_star, 1e-8);
        CHECK(r.pass());

        const EquilibriumReport scaled = verify_exchange_equilibrium(market, eq.x_star, 7.0 * eq.p_star, 1e-8);
        CHECK(scaled.optimal == r.optimal);
        CHECK(scaled.not_oversold == r.not_oversold);
        CHECK(scaled.fully_allocated == r.fully_allocated);
        CHECK(std::abs(scaled.demand_residual - r.demand_residual) <= 1e-12);

        Matrix swapped = eq.x_star;
        swapped.row(0).swap(swapped.row(1));
        CHECK_FALSE(verify_exchange_equilibrium(market, swapped, eq.p_star, 1e-8).optimal);
    }
}

TEST_CASE("dispatch on mode") {
    std::mt19937_64 rng(4);
    const MarketSpec f = random_fisher(rng, Fam::Ces, 2, 2);
    CHECK(max_abs(solve_equilibrium(f).p_star, solve_fisher_eq(f).p_star) == 0.0);
    const MarketSpec x = random_exchange(rng, Fam::Ces, 2, 2);
    CHECK(max_abs(solve_equilibrium(x).p_star, solve_exchange_eq(x).p_star) == 0.0);
}
