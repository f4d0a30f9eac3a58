#pragma once

#include <vector>

#include "prd/types.hpp"
#include "prd/utility.hpp"

namespace prd {

/// Optimal bundle at prices p with budget e.
struct DemandResult {
    Vector x;
    double spent = 0.0;   // p . x, equals e up to solver tolerance
    double lambda = 0.0;  // multiplier of the budget constraint
};

inline constexpr double kSeparableDemandTol = 1e-14;

/// Closed form for Cobb-Douglas and CES; separable utilities go through
/// demand_separable_numeric with kSeparableDemandTol.
DemandResult demand(const UtilitySpec& u, const PriceVector& p, double e);

/// x_j(lambda) = (lambda p_j / (a_j rho_j))^{1/(rho_j - 1)} with lambda bracketed and
/// bisected (in log space) until |p.x - e| / e <= tol.
DemandResult demand_separable_numeric(const SeparablePower& u, const PriceVector& p, double e, double tol);

/// q_j = e grad_j u(x) / sum_k x_k grad_k u(x): the price at which x is exactly
/// the demand with budget e. Rejects bundles on the boundary.
PriceVector corresponding_price(const UtilitySpec& u, const Vector& x, double e);

/// Per-good outcome of a comparative-statics check.
struct GoodsCheck {
    std::vector<bool> checked;  // false where the check does not apply to the good
    std::vector<bool> pass;
    Vector low;   // demand at the lower price / budget
    Vector high;  // demand at the higher price / budget

    bool all_pass() const;
};

/// Gross substitutes: raising some prices (p <= p_hi) never lowers demand for goods
/// whose price is unchanged.
GoodsCheck check_gs_property(const UtilitySpec& u, const PriceVector& p, const PriceVector& p_hi, double e);

/// Normal goods: demand is weakly increasing in the budget.
GoodsCheck check_normal_goods(const UtilitySpec& u, const PriceVector& p, double e, double e_hi);

}  // namespace prd
