#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "prd/error.hpp"
#include "prd/kernels.hpp"
#include "prd/lazy_exchange.hpp"
#include "prd/pr_fisher.hpp"

using namespace prd;
using namespace prd::testing;

TEST_CASE("OpenMP kernels reproduce the serial reference bit for bit") {
    std::mt19937_64 rng(101);
    for (auto [n, m] : {std::pair{1, 1}, {3, 4}, {17, 5}, {64, 80}}) {
        for (Fam fam : kAllFamilies) {
            const MarketSpec market = random_fisher(rng, fam, n, m);
            Matrix bids(n, m);
            for (Eigen::Index i = 0; i < n; ++i) bids.row(i) = random_positive(rng, m).transpose();

            Vector p_serial, p_omp;
            serial::column_sums(bids, p_serial);
            omp::column_sums(bids, p_omp);
            CHECK(p_serial == p_omp);

            Matrix x_serial, x_omp;
            serial::proportional_allocation(bids, p_serial, x_serial);
            omp::proportional_allocation(bids, p_omp, x_omp);
            CHECK(x_serial == x_omp);

            const Vector spend = Eigen::Map<const Vector>(market.budgets.data(), n);
            Matrix b_serial, b_omp;
            serial::respond(market.utilities, x_serial, spend, b_serial);
            omp::respond(market.utilities, x_omp, spend, b_omp);
            CHECK(b_serial == b_omp);
        }
    }
}

TEST_CASE("whole runs agree across backends") {
    std::mt19937_64 rng(202);
    const MarketSpec fisher = random_fisher(rng, Fam::Ces, 6, 7);
    const StopRule stop(300, 0.0);
    const DynamicsTrace a = run_fisher(fisher, default_initial_bids(fisher), stop, 1, Backend::Serial);
    const DynamicsTrace b = run_fisher(fisher, default_initial_bids(fisher), stop, 1, Backend::OpenMP);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) CHECK(a.records[k].bids == b.records[k].bids);

    const MarketSpec exchange = random_exchange(rng, Fam::SeparablePower, 4, 6);
    const DynamicsTrace c = run_exchange(exchange, default_initial_exchange(exchange), stop, 1, Backend::Serial);
    const DynamicsTrace d = run_exchange(exchange, default_initial_exchange(exchange), stop, 1, Backend::OpenMP);
    REQUIRE(c.records.size() == d.records.size());
    for (std::size_t k = 0; k < c.records.size(); ++k) {
        CHECK(c.records[k].bids == d.records[k].bids);
        CHECK(c.records[k].budgets == d.records[k].budgets);
    }
}

TEST_CASE("errors raised inside the parallel region reach the caller") {
    const std::vector<UtilitySpec> us(8, make_ces(vec({1, 1}), 0.5));
    Matrix alloc = Matrix::Constant(8, 2, 0.125);
    alloc(5, 1) = 0.0;
    Matrix next;
    for (Backend backend : {Backend::Serial, Backend::OpenMP}) {
        try {
            respond(backend, us, alloc, Vector::Ones(8), next);
            FAIL("expected NonPositiveBundle");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NonPositiveBundle);
        }
    }
}
