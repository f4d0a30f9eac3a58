#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "prd/equilibrium.hpp"
#include "prd/lazy_exchange.hpp"
#include "prd/market.hpp"
#include "prd/trace.hpp"
#include "prd/utility.hpp"

namespace prd {

inline constexpr double kDefaultSlack = 1e-9;

struct Violation {
    std::size_t iteration = 0;
    double excess = 0.0;  // amount by which the inequality failed, beyond the slack
};

/// Average-price bound at horizon T: lhs = sum_j p*_j log(p*_j / mean_{1..T} p_j),
/// rhs = KL(b* || b^0) / T.
struct RateRow {
    std::size_t horizon = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct DiagnosticsReport {
    std::vector<double> potential_series;  // one value per trace record
    std::vector<Violation> monotone_violations;
    std::vector<RateRow> avg_price_bound;
    std::vector<Violation> rate_violations;
    /// Smallest margin of the personal-price inequality over the checked iterates
    /// (minus lemma_33_check); nonnegative when it holds everywhere.
    double lemma_gap_min = std::numeric_limits<double>::infinity();
    double slack = kDefaultSlack;
    bool pass = true;
};

/// Unnormalized KL divergence sum_k a_k log(a_k / b_k) over positive measures.
double kl_divergence(const Vector& a, const Vector& b);

/// sum_ij b*_ij log(b*_ij / b_ij); nonnegative when the row sums agree.
double fisher_potential(const BidMatrix& b_star, const BidMatrix& b_t);

/// KL(b*||b^{t+1}) <= KL(b*||b^t) - KL(p*||p^t) + slack for every recorded step.
/// Needs a trace with every iteration recorded.
DiagnosticsReport check_potential_decrease(const DynamicsTrace& trace, const EquilibriumResult& eq, double slack);

/// One row per horizon T = 1..last iteration. Needs a consecutive trace.
std::vector<RateRow> check_avg_price_rate(const DynamicsTrace& trace, const EquilibriumResult& eq,
                                          const BidMatrix& b0);

/// sum_j p_j x_j(p) log(p_j / q_j) - sum_j p_j [x_j(q) - x_j(p)], where x(.) is the
/// demand with budget e. Nonpositive for gross-substitutes utilities.
double lemma_gap(const UtilitySpec& u, const PriceVector& p, const PriceVector& q, double e);

/// With q_i the corresponding prices of the strictly positive, clearing allocation x:
/// sum_ij x*_ij p*_j log p*_j - sum_ij x*_ij p*_j log q_ij. Nonpositive.
double lemma_33_check(const MarketSpec& market, const EquilibriumResult& eq, const Allocation& alloc);

/// sum_ij b*_ij log(b*_ij / b_ij) + sum_i ((1 - alpha_i) / alpha_i) e*_i log(e*_i / e_i).
double exchange_potential(const BidMatrix& bids, const Vector& spend, const LazyEquilibrium& eq);

/// Runs every Fisher check over a consecutive trace.
DiagnosticsReport fisher_diagnostics(const MarketSpec& market, const DynamicsTrace& trace,
                                     const EquilibriumResult& eq, double slack = kDefaultSlack);

/// Non-increase of the lazy potential over a consecutive exchange trace.
DiagnosticsReport exchange_diagnostics(const MarketSpec& market, const DynamicsTrace& trace,
                                       const LazyEquilibrium& eq, double slack = kDefaultSlack);

}  // namespace prd
