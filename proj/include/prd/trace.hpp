#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "prd/market.hpp"
#include "prd/types.hpp"

namespace prd {

enum class StopReason { PriceTolerance, AllocationTolerance, MaxIters };

std::string_view to_string(StopReason reason) noexcept;

/// Run length and convergence threshold shared by both dynamics. `max_iters` counts
/// visited iterates t = 0, 1, ..., so max_iters = 1 records only the initial state.
struct StopRule {
    StopRule(std::size_t max_iters, double price_tol);

    std::size_t max_iters;
    double price_tol;
};

/// State of one recorded round t: bids b^t together with the prices p^t and the
/// allocation x^t they induce.
struct TraceRecord {
    std::size_t iteration = 0;
    PriceVector prices;
    BidMatrix bids;
    Allocation alloc;
    Vector budgets;  // B^t, exchange runs only
    double max_price_delta = std::numeric_limits<double>::quiet_NaN();
    double max_alloc_delta = std::numeric_limits<double>::quiet_NaN();
};

struct DynamicsTrace {
    MarketMode mode = MarketMode::Fisher;
    std::size_t record_every = 1;
    std::vector<TraceRecord> records;
    StopReason stop = StopReason::MaxIters;

    const TraceRecord& final_record() const { return records.back(); }
    /// True when every iteration from 0 to the last one is present.
    bool consecutive() const;
};

}  // namespace prd
