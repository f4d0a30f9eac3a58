#include "prd/market.hpp"

#include <cmath>
#include <string>

#include "prd/error.hpp"

namespace prd {

std::string_view to_string(MarketMode mode) noexcept {
    return mode == MarketMode::Fisher ? "fisher" : "exchange";
}

MarketSpec make_fisher_market(std::vector<UtilitySpec> utilities, std::vector<double> budgets) {
    MarketSpec spec;
    spec.mode = MarketMode::Fisher;
    spec.n_goods = utilities.empty() ? 0 : goods_count(utilities.front());
    spec.utilities = std::move(utilities);
    spec.budgets = std::move(budgets);
    validate_market(spec);
    return spec;
}

MarketSpec make_exchange_market(std::vector<UtilitySpec> utilities,
                                std::vector<std::vector<std::size_t>> endowments,
                                std::vector<double> laziness) {
    MarketSpec spec;
    spec.mode = MarketMode::Exchange;
    spec.n_goods = utilities.empty() ? 0 : goods_count(utilities.front());
    spec.utilities = std::move(utilities);
    spec.endowments = std::move(endowments);
    spec.laziness = std::move(laziness);
    validate_market(spec);
    return spec;
}

const MarketSpec& validate_market(const MarketSpec& spec) {
    const std::size_t n = spec.n_agents();
    if (n == 0) throw Error(Errc::InvalidArgument, "market has no agents");
    if (spec.n_goods == 0) throw Error(Errc::InvalidArgument, "market has no goods");

    for (std::size_t i = 0; i < n; ++i) {
        try {
            validate_utility(spec.utilities[i]);
        } catch (const Error& err) {
            throw Error(err.code(), "agent " + std::to_string(i) + ": " + err.detail());
        }
        if (goods_count(spec.utilities[i]) != spec.n_goods)
            throw Error(Errc::UtilityParamInvalid,
                        "agent " + std::to_string(i) + ": utility covers " +
                            std::to_string(goods_count(spec.utilities[i])) + " goods, market has " +
                            std::to_string(spec.n_goods));
    }

    if (spec.mode == MarketMode::Fisher) {
        if (!spec.endowments.empty() || !spec.laziness.empty())
            throw Error(Errc::ModeMismatch, "Fisher market may not carry endowments or laziness");
        if (spec.budgets.size() != n)
            throw Error(Errc::NonPositiveBudget, "Fisher market needs one budget per buyer");
        for (std::size_t i = 0; i < n; ++i) {
            if (!(spec.budgets[i] > 0.0) || !std::isfinite(spec.budgets[i]))
                throw Error(Errc::NonPositiveBudget,
                            "buyer " + std::to_string(i) + " budget " + std::to_string(spec.budgets[i]));
        }
        return spec;
    }

    if (!spec.budgets.empty()) throw Error(Errc::ModeMismatch, "exchange market may not carry budgets");
    if (spec.laziness.size() != n)
        throw Error(Errc::LazinessOutOfRange, "exchange market needs one alpha per agent");
    for (std::size_t i = 0; i < n; ++i) {
        const double alpha = spec.laziness[i];
        if (!(alpha > 0.0 && alpha < 1.0))
            throw Error(Errc::LazinessOutOfRange,
                        "agent " + std::to_string(i) + " alpha " + std::to_string(alpha) + " not in (0,1)");
    }
    if (spec.endowments.size() != n)
        throw Error(Errc::EndowmentNotPartition, "exchange market needs one endowment set per agent");
    std::vector<int> owned(spec.n_goods, 0);
    for (std::size_t i = 0; i < n; ++i) {
        // An agent without goods earns nothing and her bids decay to zero.
        if (spec.endowments[i].empty())
            throw Error(Errc::EndowmentNotPartition, "agent " + std::to_string(i) + " owns no goods");
        for (std::size_t j : spec.endowments[i]) {
            if (j >= spec.n_goods)
                throw Error(Errc::EndowmentNotPartition, "good index " + std::to_string(j) + " out of range");
            if (++owned[j] > 1)
                throw Error(Errc::EndowmentNotPartition, "good " + std::to_string(j) + " owned twice");
        }
    }
    for (std::size_t j = 0; j < spec.n_goods; ++j) {
        if (owned[j] == 0) throw Error(Errc::EndowmentNotPartition, "good " + std::to_string(j) + " has no owner");
    }
    return spec;
}

std::vector<std::size_t> good_owners(const MarketSpec& spec) {
    std::vector<std::size_t> owner(spec.n_goods, 0);
    for (std::size_t i = 0; i < spec.endowments.size(); ++i)
        for (std::size_t j : spec.endowments[i]) owner[j] = i;
    return owner;
}

bool bids_consistent(const BidMatrix& bids, const Vector& spend, double rel_tol) {
    if (bids.rows() != spend.size()) return false;
    for (Eigen::Index i = 0; i < bids.rows(); ++i) {
        if ((bids.row(i).array() <= 0.0).any()) return false;
        if (std::abs(bids.row(i).sum() - spend[i]) > rel_tol * spend[i]) return false;
    }
    return true;
}

}  // namespace prd
