#include "prd/demand.hpp"

#include <cmath>
#include <string>
#include <variant>

#include "prd/error.hpp"

namespace prd {
namespace {

void check_prices(const PriceVector& p, std::size_t m) {
    if (static_cast<std::size_t>(p.size()) != m)
        throw Error(Errc::LengthMismatch, "price vector has " + std::to_string(p.size()) + " entries, expected " +
                                              std::to_string(m));
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        if (!(p[j] > 0.0) || !std::isfinite(p[j]))
            throw Error(Errc::NonPositivePrice, "p_" + std::to_string(j) + " = " + std::to_string(p[j]));
    }
}

void check_budget(double e) {
    if (!(e > 0.0) || !std::isfinite(e)) throw Error(Errc::NonPositiveBudget, "budget " + std::to_string(e));
}

DemandResult finish(const UtilitySpec& u, const PriceVector& p, Vector x) {
    DemandResult r;
    r.spent = p.dot(x);
    r.lambda = eval_gradient(u, x)[0] / p[0];
    r.x = std::move(x);
    return r;
}

// Spending p.x(lambda) for the separable family, lambda given as its log.
double separable_spend(const SeparablePower& u, const PriceVector& p, double log_lambda, Vector* x_out) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        const double log_x =
            (log_lambda + std::log(p[j]) - std::log(u.weights[j] * u.rhos[j])) / (u.rhos[j] - 1.0);
        const double xj = std::exp(log_x);
        if (x_out) (*x_out)[j] = xj;
        total += p[j] * xj;
    }
    return total;
}

}  // namespace

DemandResult demand_separable_numeric(const SeparablePower& u, const PriceVector& p, double e, double tol) {
    const std::size_t m = static_cast<std::size_t>(u.weights.size());
    check_prices(p, m);
    check_budget(e);
    if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");

    constexpr int kMaxBracketSteps = 200;
    constexpr int kMaxBisections = 200;
    const double log2 = std::log(2.0);

    // Spending is strictly decreasing in lambda.
    double lo = 0.0;
    double hi = 0.0;
    if (separable_spend(u, p, 0.0, nullptr) > e) {
        int steps = 0;
        while (separable_spend(u, p, hi, nullptr) > e) {
            lo = hi;
            hi += log2;
            if (++steps > kMaxBracketSteps) throw Error(Errc::BracketingFailure, "no upper multiplier bracket");
        }
    } else {
        int steps = 0;
        while (separable_spend(u, p, lo, nullptr) < e) {
            hi = lo;
            lo -= log2;
            if (++steps > kMaxBracketSteps) throw Error(Errc::BracketingFailure, "no lower multiplier bracket");
        }
    }

    Vector x(static_cast<Eigen::Index>(m));
    for (int step = 0; step < kMaxBisections; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double spent = separable_spend(u, p, mid, &x);
        if (std::abs(spent - e) <= tol * e) {
            DemandResult r;
            r.x = std::move(x);
            r.spent = spent;
            r.lambda = std::exp(mid);
            return r;
        }
        if (mid == lo || mid == hi) break;
        (spent > e ? lo : hi) = mid;
    }
    throw Error(Errc::ToleranceNotReached, "multiplier bisection stalled above tolerance " + std::to_string(tol));
}

DemandResult demand(const UtilitySpec& u, const PriceVector& p, double e) {
    const std::size_t m = goods_count(u);
    check_prices(p, m);
    check_budget(e);

    if (const auto* cd = std::get_if<CobbDouglas>(&u)) {
        Vector x = (e * cd->weights.array() / p.array()).matrix();
        return finish(u, p, std::move(x));
    }
    if (const auto* ces = std::get_if<Ces>(&u)) {
        const double sigma = 1.0 / (1.0 - ces->rho);
        const Eigen::ArrayXd numer = ces->weights.array().pow(sigma) * p.array().pow(-sigma);
        const double denom = (numer * p.array()).sum();
        Vector x = (e * numer / denom).matrix();
        return finish(u, p, std::move(x));
    }
    return demand_separable_numeric(std::get<SeparablePower>(u), p, e, kSeparableDemandTol);
}

PriceVector corresponding_price(const UtilitySpec& u, const Vector& x, double e) {
    check_budget(e);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (!(x[j] > 0.0)) throw Error(Errc::BoundaryBundle, "x_" + std::to_string(j) + " = " + std::to_string(x[j]));
    }
    // q_j = e * share_j / x_j, since share_j = x_j grad_j u / sum_k x_k grad_k u.
    const Vector shares = bid_shares(u, x);
    return (e * shares.array() / x.array()).matrix();
}

bool GoodsCheck::all_pass() const {
    for (std::size_t j = 0; j < pass.size(); ++j)
        if (checked[j] && !pass[j]) return false;
    return true;
}

GoodsCheck check_gs_property(const UtilitySpec& u, const PriceVector& p, const PriceVector& p_hi, double e) {
    if (p.size() != p_hi.size()) throw Error(Errc::LengthMismatch, "price vectors differ in length");
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        if (p[j] > p_hi[j]) throw Error(Errc::PriceNotDominated, "p_" + std::to_string(j) + " exceeds p_hi");
    }
    GoodsCheck report;
    report.low = demand(u, p, e).x;
    report.high = demand(u, p_hi, e).x;
    const auto m = static_cast<std::size_t>(p.size());
    report.checked.assign(m, false);
    report.pass.assign(m, true);
    for (std::size_t j = 0; j < m; ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        if (p[k] != p_hi[k]) continue;
        report.checked[j] = true;
        report.pass[j] = report.low[k] <= report.high[k] + 1e-10;
    }
    return report;
}

GoodsCheck check_normal_goods(const UtilitySpec& u, const PriceVector& p, double e, double e_hi) {
    if (e > e_hi) throw Error(Errc::BudgetNotDominated, "e exceeds e_hi");
    GoodsCheck report;
    report.low = demand(u, p, e).x;
    report.high = demand(u, p, e_hi).x;
    const auto m = static_cast<std::size_t>(p.size());
    report.checked.assign(m, true);
    report.pass.assign(m, true);
    for (std::size_t j = 0; j < m; ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        report.pass[j] = report.low[k] <= report.high[k] + 1e-10;
    }
    return report;
}

}  // namespace prd
