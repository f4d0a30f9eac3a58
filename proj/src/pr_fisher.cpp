#include "prd/pr_fisher.hpp"

#include <cmath>
#include <string>

#include "prd/error.hpp"

namespace prd {
namespace {

void require_fisher(const MarketSpec& market) {
    if (market.mode != MarketMode::Fisher) throw Error(Errc::ModeMismatch, "proportional response needs a Fisher market");
}

void require_positive_bids(const MarketSpec& market, const BidMatrix& bids) {
    if (static_cast<std::size_t>(bids.rows()) != market.n_agents() ||
        static_cast<std::size_t>(bids.cols()) != market.n_goods)
        throw Error(Errc::ShapeMismatch, "bid matrix shape does not match the market");
    for (Eigen::Index i = 0; i < bids.rows(); ++i)
        for (Eigen::Index j = 0; j < bids.cols(); ++j)
            if (!(bids(i, j) > 0.0) || !std::isfinite(bids(i, j)))
                throw Error(Errc::NonPositiveBid,
                            "b(" + std::to_string(i) + "," + std::to_string(j) + ") = " + std::to_string(bids(i, j)));
}

void require_above_floor(const BidMatrix& bids) {
    for (Eigen::Index i = 0; i < bids.rows(); ++i)
        for (Eigen::Index j = 0; j < bids.cols(); ++j)
            if (!(bids(i, j) >= kPositivityFloor))
                throw Error(Errc::UnderflowDetected,
                            "b(" + std::to_string(i) + "," + std::to_string(j) + ") = " + std::to_string(bids(i, j)));
}

Vector budget_vector(const MarketSpec& market) {
    return Eigen::Map<const Vector>(market.budgets.data(), static_cast<Eigen::Index>(market.budgets.size()));
}

}  // namespace

FisherStep pr_step(const MarketSpec& market, const FisherState& state, Backend backend) {
    require_fisher(market);
    require_positive_bids(market, state.bids);

    FisherStep out;
    column_sums(backend, state.bids, out.prices);
    proportional_allocation(backend, state.bids, out.prices, out.alloc);
    respond(backend, market.utilities, out.alloc, budget_vector(market), out.next.bids);
    require_above_floor(out.next.bids);
    out.next.iteration = state.iteration + 1;
    return out;
}

BidMatrix default_initial_bids(const MarketSpec& market) {
    require_fisher(market);
    const auto n = static_cast<Eigen::Index>(market.n_agents());
    const auto m = static_cast<Eigen::Index>(market.n_goods);
    BidMatrix bids(n, m);
    for (Eigen::Index i = 0; i < n; ++i) bids.row(i).setConstant(market.budgets[static_cast<std::size_t>(i)] / m);
    return bids;
}

DynamicsTrace run_fisher(const MarketSpec& market, const BidMatrix& b0, const StopRule& stop,
                         std::size_t record_every, Backend backend) {
    require_fisher(market);
    require_positive_bids(market, b0);
    if (record_every < 1) throw Error(Errc::InvalidArgument, "record_every must be at least 1");
    if (!bids_consistent(b0, budget_vector(market), 1e-12))
        throw Error(Errc::InvalidArgument, "initial bid rows must sum to the budgets");

    DynamicsTrace trace;
    trace.mode = MarketMode::Fisher;
    trace.record_every = record_every;

    FisherState state{b0, 0};
    PriceVector prev_prices;
    for (std::size_t t = 0;; ++t) {
        FisherStep step;
        column_sums(backend, state.bids, step.prices);
        proportional_allocation(backend, state.bids, step.prices, step.alloc);

        const double delta =
            t == 0 ? std::numeric_limits<double>::quiet_NaN() : (step.prices - prev_prices).cwiseAbs().maxCoeff();
        const bool converged = t > 0 && delta < stop.price_tol;
        const bool last = converged || t + 1 >= stop.max_iters;

        if (t % record_every == 0 || last) {
            TraceRecord rec;
            rec.iteration = t;
            rec.prices = step.prices;
            rec.bids = state.bids;
            rec.alloc = step.alloc;
            rec.max_price_delta = delta;
            trace.records.push_back(std::move(rec));
        }
        if (last) {
            trace.stop = converged ? StopReason::PriceTolerance : StopReason::MaxIters;
            break;
        }

        respond(backend, market.utilities, step.alloc, budget_vector(market), step.next.bids);
        require_above_floor(step.next.bids);
        prev_prices = std::move(step.prices);
        state.bids = std::move(step.next.bids);
        state.iteration = t + 1;
    }
    return trace;
}

}  // namespace prd
