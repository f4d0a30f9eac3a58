#pragma once

#include <cstddef>

#include "prd/market.hpp"
#include "prd/types.hpp"

namespace prd {

struct EquilibriumResiduals {
    double clearing = 0.0;        // max_j |sum_i x_ij - 1|
    double optimality_gap = 0.0;  // max_ij |x_ij - demand_ij(p, e_i)|
    double budget_gap = 0.0;      // max_i |p . x_i - e_i| / e_i
};

struct EquilibriumResult {
    Allocation x_star;
    PriceVector p_star;
    BidMatrix b_star;  // x*_ij p*_j
    EquilibriumResiduals residuals;
    bool converged = false;
    std::size_t iterations = 0;
};

struct SolverOptions {
    double tol = 1e-12;
    std::size_t max_iters = 100000;
    double damping = 0.3;  // initial exponent of the multiplicative price update
};

/// Fisher equilibrium. All-Cobb-Douglas markets use the closed form
/// p*_j = sum_i e_i a_ij; otherwise prices follow p <- p * z(p)^damping with z the
/// aggregate demand, renormalized to sum_j p_j = sum_i e_i, until max_j |z_j - 1| <= tol.
/// The damping is halved whenever the clearing residual grows. Non-convergence is
/// reported through `converged`, never thrown.
EquilibriumResult solve_fisher_eq(const MarketSpec& market, const SolverOptions& options = {});

/// Exchange equilibrium with wealth e_i(p) = sum_{j in G_i} p_j and prices normalized
/// to sum to one; same damped iteration.
EquilibriumResult solve_exchange_eq(const MarketSpec& market, const SolverOptions& options = {});

/// Dispatches on the market mode.
EquilibriumResult solve_equilibrium(const MarketSpec& market, const SolverOptions& options = {});

struct EquilibriumReport {
    double demand_residual = 0.0;  // condition 1: max_ij |x_ij - demand_ij(p, e_i)|
    double oversold = 0.0;         // condition 2: max_j (sum_i x_ij - 1)
    double undersold = 0.0;        // condition 3: max_j (1 - sum_i x_ij)
    bool optimal = false;
    bool not_oversold = false;
    bool fully_allocated = false;

    bool pass() const { return optimal && not_oversold && fully_allocated; }
};

EquilibriumReport verify_fisher_equilibrium(const MarketSpec& market, const Allocation& x, const PriceVector& p,
                                            double tol);

/// Prices are normalized to unit sum first, so the report does not depend on the
/// price scale.
EquilibriumReport verify_exchange_equilibrium(const MarketSpec& market, const Allocation& x, const PriceVector& p,
                                              double tol);

}  // namespace prd
