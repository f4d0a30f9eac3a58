#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>

#include "prd/types.hpp"

namespace prd {

/// u(x) = prod_j x_j^{a_j}, weights on the simplex.
struct CobbDouglas {
    Vector weights;
};

/// u(x) = (sum_j a_j x_j^rho)^{1/rho}, 0 < rho < 1.
struct Ces {
    Vector weights;
    double rho = 0.5;
};

/// u(x) = sum_j a_j x_j^{rho_j}, every 0 < rho_j < 1. Not homogeneous unless the
/// exponents coincide.
struct SeparablePower {
    Vector weights;
    Vector rhos;
};

using UtilitySpec = std::variant<CobbDouglas, Ces, SeparablePower>;

bool operator==(const CobbDouglas& a, const CobbDouglas& b);
bool operator==(const Ces& a, const Ces& b);
bool operator==(const SeparablePower& a, const SeparablePower& b);

// Factories validate parameters and throw Error(UtilityParamInvalid). Cobb-Douglas
// weights are rescaled onto the simplex unless they already sum to 1 within 1e-12.
CobbDouglas make_cobb_douglas(Vector weights);
Ces make_ces(Vector weights, double rho);
SeparablePower make_separable_power(Vector weights, Vector rhos);

void validate_utility(const UtilitySpec& u);
std::size_t goods_count(const UtilitySpec& u);
std::string_view family_name(const UtilitySpec& u);

/// Cobb-Douglas and CES are homogeneous of degree one.
bool is_homogeneous(const UtilitySpec& u);

double eval_utility(const UtilitySpec& u, const Vector& x);
Vector eval_gradient(const UtilitySpec& u, const Vector& x);

/// share_j = x_j grad_j u(x) / sum_k x_k grad_k u(x). Strictly positive, sums to one.
Vector bid_shares(const UtilitySpec& u, const Vector& x);

/// Allocation-free variant used by the dynamics kernels; `out` may not alias `x`.
void bid_shares_into(const UtilitySpec& u, std::span<const double> x, std::span<double> out);

}  // namespace prd
