#pragma once

#include <cstddef>

#include "prd/kernels.hpp"
#include "prd/market.hpp"
#include "prd/trace.hpp"

namespace prd {

struct ExchangeStep {
    ExchangeState next;  // B^{t+1}, e^{t+1}, b^{t+1}
    PriceVector prices;  // p^t
    Allocation alloc;    // x^t
};

/// One round of lazy proportional response. Agent i keeps (1 - alpha_i) of her bank
/// balance, collects the revenue of the goods she owns, and bids alpha_i of the new
/// balance in proportion to x_ij grad_j u_i(x_i).
ExchangeStep lazy_step(const MarketSpec& market, const ExchangeState& state, Backend backend = Backend::OpenMP);

/// B_i = 1/n, e_i = alpha_i B_i, b_ij = e_i / m.
ExchangeState default_initial_exchange(const MarketSpec& market);

/// Rescales arbitrary positive balances so they sum to one, then splits spend uniformly.
ExchangeState exchange_state_from_budgets(const MarketSpec& market, Vector budgets);

/// Iterates lazy_step until the successive allocation change drops below
/// stop.price_tol or stop.max_iters iterates have been visited.
DynamicsTrace run_exchange(const MarketSpec& market, const ExchangeState& init, const StopRule& stop,
                           std::size_t record_every = 1, Backend backend = Backend::OpenMP);

/// Equilibrium expressed in the variables of the lazy dynamics, with total money one:
/// e*_i = sum_{j in G_i} p*_j, B*_i = e*_i / alpha_i, b*_ij = x*_ij p*_j, all divided by
/// sum_i B*_i. Starting the dynamics here reproduces the same state every round.
struct LazyEquilibrium {
    Vector budgets;
    Vector spend;
    BidMatrix bids;
    PriceVector prices;
    Allocation alloc;
    Vector alpha;

    ExchangeState state() const;
};

LazyEquilibrium to_lazy_equilibrium(const MarketSpec& market, const Allocation& x_star, const PriceVector& p_star);

}  // namespace prd
