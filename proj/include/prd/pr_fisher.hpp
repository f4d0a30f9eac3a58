#pragma once

#include <cstddef>

#include "prd/kernels.hpp"
#include "prd/market.hpp"
#include "prd/trace.hpp"

namespace prd {

/// New bids below this are reported as UnderflowDetected instead of flushed to zero.
inline constexpr double kPositivityFloor = 1e-280;

struct FisherState {
    BidMatrix bids;
    std::size_t iteration = 0;
};

struct FisherStep {
    FisherState next;    // b^{t+1}
    PriceVector prices;  // p^t
    Allocation alloc;    // x^t
};

/// One round of generalized proportional response:
///   p_j = sum_i b_ij,  x_ij = b_ij / p_j,  b'_ij = e_i x_ij grad_j u_i / sum_k x_ik grad_k u_i.
FisherStep pr_step(const MarketSpec& market, const FisherState& state, Backend backend = Backend::OpenMP);

/// b_ij = e_i / m.
BidMatrix default_initial_bids(const MarketSpec& market);

/// Iterates pr_step from b0 until the successive price change drops below
/// stop.price_tol or stop.max_iters iterates have been visited. Records every
/// record_every-th iterate and always the final one.
DynamicsTrace run_fisher(const MarketSpec& market, const BidMatrix& b0, const StopRule& stop,
                         std::size_t record_every = 1, Backend backend = Backend::OpenMP);

}  // namespace prd
