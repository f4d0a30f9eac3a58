#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "prd/types.hpp"
#include "prd/utility.hpp"

namespace prd {

enum class MarketMode { Fisher, Exchange };

std::string_view to_string(MarketMode mode) noexcept;

/// Immutable description of a market with unit supply of every good.
///
/// Fisher markets carry one budget per buyer. Exchange markets instead carry, per
/// agent, the set of goods she owns and her laziness alpha_i in (0,1). Use the
/// factories below; they run validate_market before returning.
struct MarketSpec {
    MarketMode mode = MarketMode::Fisher;
    std::size_t n_goods = 0;
    std::vector<UtilitySpec> utilities;
    std::vector<double> budgets;                         // Fisher only
    std::vector<std::vector<std::size_t>> endowments;   // Exchange only, 0-based good indices
    std::vector<double> laziness;                        // Exchange only

    std::size_t n_agents() const noexcept { return utilities.size(); }
    bool is_fisher() const noexcept { return mode == MarketMode::Fisher; }

    bool operator==(const MarketSpec&) const = default;
};

MarketSpec make_fisher_market(std::vector<UtilitySpec> utilities, std::vector<double> budgets);
MarketSpec make_exchange_market(std::vector<UtilitySpec> utilities,
                                std::vector<std::vector<std::size_t>> endowments,
                                std::vector<double> laziness);

/// Throws Error with NonPositiveBudget, EndowmentNotPartition, LazinessOutOfRange,
/// UtilityParamInvalid or ModeMismatch; returns the spec unchanged otherwise.
const MarketSpec& validate_market(const MarketSpec& spec);

/// owner[j] = index of the agent endowed with good j (exchange markets).
std::vector<std::size_t> good_owners(const MarketSpec& spec);

/// Agent-side money state of lazy proportional response.
struct ExchangeState {
    Vector budgets;   // B_i^t, sums to one
    Vector spend;     // e_i^t = alpha_i B_i^t
    BidMatrix bids;   // rows sum to spend
    std::size_t iteration = 0;
};

/// Checks positivity and row sums of a bid matrix against per-agent spend, relative tol.
bool bids_consistent(const BidMatrix& bids, const Vector& spend, double rel_tol);

}  // namespace prd
