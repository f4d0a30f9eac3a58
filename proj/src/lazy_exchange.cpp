#include "prd/lazy_exchange.hpp"

#include <cmath>
#include <string>

#include "prd/error.hpp"
#include "prd/pr_fisher.hpp"

namespace prd {
namespace {

void require_exchange(const MarketSpec& market) {
    if (market.mode != MarketMode::Exchange)
        throw Error(Errc::ModeMismatch, "lazy proportional response needs an exchange market");
}

void require_state(const MarketSpec& market, const ExchangeState& state) {
    const auto n = static_cast<Eigen::Index>(market.n_agents());
    const auto m = static_cast<Eigen::Index>(market.n_goods);
    if (state.bids.rows() != n || state.bids.cols() != m || state.budgets.size() != n || state.spend.size() != n)
        throw Error(Errc::ShapeMismatch, "exchange state shape does not match the market");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (!(state.bids(i, j) > 0.0) || !std::isfinite(state.bids(i, j)))
                throw Error(Errc::NonPositiveBid, "b(" + std::to_string(i) + "," + std::to_string(j) +
                                                      ") = " + std::to_string(state.bids(i, j)));
}

Vector alpha_vector(const MarketSpec& market) {
    return Eigen::Map<const Vector>(market.laziness.data(), static_cast<Eigen::Index>(market.laziness.size()));
}

// B^{t+1}_i = (1 - alpha_i) B^t_i + sum_{j in G_i} p^t_j
Vector collect(const MarketSpec& market, const Vector& budgets, const PriceVector& prices) {
    Vector next(budgets.size());
    for (std::size_t i = 0; i < market.n_agents(); ++i) {
        double revenue = 0.0;
        for (std::size_t j : market.endowments[i]) revenue += prices[static_cast<Eigen::Index>(j)];
        const auto k = static_cast<Eigen::Index>(i);
        next[k] = (1.0 - market.laziness[i]) * budgets[k] + revenue;
    }
    return next;
}

void check_floor(const BidMatrix& bids) {
    if (!(bids.minCoeff() >= kPositivityFloor))
        throw Error(Errc::UnderflowDetected, "bid fell below " + std::to_string(kPositivityFloor));
}

}  // namespace

ExchangeStep lazy_step(const MarketSpec& market, const ExchangeState& state, Backend backend) {
    require_exchange(market);
    require_state(market, state);

    ExchangeStep out;
    column_sums(backend, state.bids, out.prices);
    proportional_allocation(backend, state.bids, out.prices, out.alloc);
    out.next.budgets = collect(market, state.budgets, out.prices);
    out.next.spend = (alpha_vector(market).array() * out.next.budgets.array()).matrix();
    respond(backend, market.utilities, out.alloc, out.next.spend, out.next.bids);
    check_floor(out.next.bids);
    out.next.iteration = state.iteration + 1;
    return out;
}

ExchangeState default_initial_exchange(const MarketSpec& market) {
    require_exchange(market);
    const auto n = static_cast<Eigen::Index>(market.n_agents());
    return exchange_state_from_budgets(market, Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

ExchangeState exchange_state_from_budgets(const MarketSpec& market, Vector budgets) {
    require_exchange(market);
    const auto n = static_cast<Eigen::Index>(market.n_agents());
    const auto m = static_cast<Eigen::Index>(market.n_goods);
    if (budgets.size() != n) throw Error(Errc::LengthMismatch, "one initial balance per agent required");
    if (!(budgets.array() > 0.0).all()) throw Error(Errc::NonPositiveBudget, "initial balances must be positive");
    const double total = budgets.sum();
    if (total != 1.0) budgets /= total;

    ExchangeState state;
    state.budgets = std::move(budgets);
    state.spend = (alpha_vector(market).array() * state.budgets.array()).matrix();
    state.bids.resize(n, m);
    for (Eigen::Index i = 0; i < n; ++i) state.bids.row(i).setConstant(state.spend[i] / static_cast<double>(m));
    return state;
}

DynamicsTrace run_exchange(const MarketSpec& market, const ExchangeState& init, const StopRule& stop,
                           std::size_t record_every, Backend backend) {
    require_exchange(market);
    require_state(market, init);
    if (record_every < 1) throw Error(Errc::InvalidArgument, "record_every must be at least 1");
    if (std::abs(init.budgets.sum() - 1.0) > 1e-10)
        throw Error(Errc::InvalidArgument, "initial balances must sum to one");

    DynamicsTrace trace;
    trace.mode = MarketMode::Exchange;
    trace.record_every = record_every;

    ExchangeState state = init;
    PriceVector prev_prices;
    Allocation prev_alloc;
    const Vector alpha = alpha_vector(market);
    for (std::size_t t = 0;; ++t) {
        PriceVector prices;
        Allocation alloc;
        column_sums(backend, state.bids, prices);
        proportional_allocation(backend, state.bids, prices, alloc);

        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double price_delta = t == 0 ? nan : (prices - prev_prices).cwiseAbs().maxCoeff();
        const double alloc_delta = t == 0 ? nan : (alloc - prev_alloc).cwiseAbs().maxCoeff();
        const bool converged = t > 0 && alloc_delta < stop.price_tol;
        const bool last = converged || t + 1 >= stop.max_iters;

        if (t % record_every == 0 || last) {
            TraceRecord rec;
            rec.iteration = t;
            rec.prices = prices;
            rec.bids = state.bids;
            rec.alloc = alloc;
            rec.budgets = state.budgets;
            rec.max_price_delta = price_delta;
            rec.max_alloc_delta = alloc_delta;
            trace.records.push_back(std::move(rec));
        }
        if (last) {
            trace.stop = converged ? StopReason::AllocationTolerance : StopReason::MaxIters;
            break;
        }

        ExchangeState next;
        next.budgets = collect(market, state.budgets, prices);
        next.spend = (alpha.array() * next.budgets.array()).matrix();
        respond(backend, market.utilities, alloc, next.spend, next.bids);
        check_floor(next.bids);
        next.iteration = t + 1;
        prev_prices = std::move(prices);
        prev_alloc = std::move(alloc);
        state = std::move(next);
    }
    return trace;
}

ExchangeState LazyEquilibrium::state() const {
    ExchangeState s;
    s.budgets = budgets;
    s.spend = spend;
    s.bids = bids;
    return s;
}

LazyEquilibrium to_lazy_equilibrium(const MarketSpec& market, const Allocation& x_star, const PriceVector& p_star) {
    require_exchange(market);
    const auto n = static_cast<Eigen::Index>(market.n_agents());
    const auto m = static_cast<Eigen::Index>(market.n_goods);
    if (x_star.rows() != n || x_star.cols() != m || p_star.size() != m)
        throw Error(Errc::ShapeMismatch, "equilibrium shape does not match the market");

    LazyEquilibrium eq;
    eq.alpha = alpha_vector(market);
    Vector wealth(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j : market.endowments[static_cast<std::size_t>(i)]) total += p_star[static_cast<Eigen::Index>(j)];
        wealth[i] = total;
    }
    const Vector balances = (wealth.array() / eq.alpha.array()).matrix();
    const double scale = balances.sum();

    eq.prices = p_star / scale;
    eq.budgets = balances / scale;
    eq.spend = wealth / scale;
    eq.alloc = x_star;
    eq.bids.resize(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) eq.bids(i, j) = x_star(i, j) * eq.prices[j];
    return eq;
}

}  // namespace prd
