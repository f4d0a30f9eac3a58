#include "prd/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <variant>

#include "prd/demand.hpp"
#include "prd/error.hpp"

namespace prd {
namespace {

constexpr double kMinDamping = 1e-4;

Vector wealth_at(const MarketSpec& market, const PriceVector& p) {
    const auto n = static_cast<Eigen::Index>(market.n_agents());
    Vector w(n);
    if (market.mode == MarketMode::Fisher) {
        for (Eigen::Index i = 0; i < n; ++i) w[i] = market.budgets[static_cast<std::size_t>(i)];
        return w;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j : market.endowments[static_cast<std::size_t>(i)]) total += p[static_cast<Eigen::Index>(j)];
        w[i] = total;
    }
    return w;
}

// Rows are the agents' demands at p; buyers are evaluated independently.
Allocation demands_at(const MarketSpec& market, const PriceVector& p, const Vector& wealth) {
    const auto n = static_cast<Eigen::Index>(market.n_agents());
    Allocation x(n, static_cast<Eigen::Index>(market.n_goods));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < n; ++i) {
        try {
            x.row(i) = demand(market.utilities[static_cast<std::size_t>(i)], p, wealth[i]).x.transpose();
        } catch (...) {
#pragma omp critical(prd_demand_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return x;
}

double clearing_residual(const Allocation& x) {
    return (x.colwise().sum().array() - 1.0).abs().maxCoeff();
}

double budget_gap(const Allocation& x, const PriceVector& p, const Vector& wealth) {
    double gap = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        gap = std::max(gap, std::abs(x.row(i).dot(p) - wealth[i]) / wealth[i]);
    return gap;
}

EquilibriumResult package(const MarketSpec& market, Allocation x, PriceVector p, bool converged, std::size_t iters) {
    EquilibriumResult r;
    const Vector w = wealth_at(market, p);
    r.residuals.clearing = clearing_residual(x);
    r.residuals.budget_gap = budget_gap(x, p, w);
    r.residuals.optimality_gap = (x - demands_at(market, p, w)).cwiseAbs().maxCoeff();
    r.b_star = (x.array().rowwise() * p.transpose().array()).matrix();
    r.x_star = std::move(x);
    r.p_star = std::move(p);
    r.converged = converged;
    r.iterations = iters;
    return r;
}

EquilibriumResult damped_price_iteration(const MarketSpec& market, const SolverOptions& options, double money) {
    if (!(options.tol > 0.0)) throw Error(Errc::InvalidArgument, "solver tolerance must be positive");
    if (!(options.damping > 0.0 && options.damping <= 1.0))
        throw Error(Errc::InvalidArgument, "damping must lie in (0,1]");

    const auto m = static_cast<Eigen::Index>(market.n_goods);
    PriceVector p = PriceVector::Constant(m, money / static_cast<double>(m));
    double gamma = options.damping;
    double prev_residual = std::numeric_limits<double>::infinity();

    Allocation x;
    for (std::size_t it = 0; it < options.max_iters; ++it) {
        x = demands_at(market, p, wealth_at(market, p));
        const Vector z = x.colwise().sum().transpose();
        const double residual = (z.array() - 1.0).abs().maxCoeff();
        if (residual <= options.tol) return package(market, std::move(x), std::move(p), true, it);
        if (residual > prev_residual) gamma = std::max(0.5 * gamma, kMinDamping);
        prev_residual = residual;

        p = (p.array() * z.array().pow(gamma)).matrix();
        p *= money / p.sum();
    }
    x = demands_at(market, p, wealth_at(market, p));
    const bool converged = clearing_residual(x) <= options.tol;
    return package(market, std::move(x), std::move(p), converged, options.max_iters);
}

bool all_cobb_douglas(const MarketSpec& market) {
    return std::all_of(market.utilities.begin(), market.utilities.end(),
                       [](const UtilitySpec& u) { return std::holds_alternative<CobbDouglas>(u); });
}

EquilibriumReport verify(const MarketSpec& market, const Allocation& x, const PriceVector& p, double tol) {
    const auto n = static_cast<Eigen::Index>(market.n_agents());
    const auto m = static_cast<Eigen::Index>(market.n_goods);
    if (x.rows() != n || x.cols() != m || p.size() != m)
        throw Error(Errc::ShapeMismatch, "allocation or prices do not match the market");

    EquilibriumReport report;
    if (!(p.array() > 0.0).all() || !p.allFinite()) {
        report.demand_residual = std::numeric_limits<double>::infinity();
        return report;
    }
    const Allocation xd = demands_at(market, p, wealth_at(market, p));
    report.demand_residual = (x - xd).cwiseAbs().maxCoeff();
    const Eigen::RowVectorXd supply_used = x.colwise().sum();
    report.oversold = (supply_used.array() - 1.0).maxCoeff();
    report.undersold = (1.0 - supply_used.array()).maxCoeff();
    report.optimal = report.demand_residual <= tol;
    report.not_oversold = report.oversold <= tol;
    report.fully_allocated = report.undersold <= tol;
    return report;
}

}  // namespace

EquilibriumResult solve_fisher_eq(const MarketSpec& market, const SolverOptions& options) {
    if (market.mode != MarketMode::Fisher) throw Error(Errc::ModeMismatch, "solve_fisher_eq needs a Fisher market");

    double money = 0.0;
    for (double e : market.budgets) money += e;

    if (all_cobb_douglas(market)) {
        const auto n = static_cast<Eigen::Index>(market.n_agents());
        const auto m = static_cast<Eigen::Index>(market.n_goods);
        PriceVector p = PriceVector::Zero(m);
        for (Eigen::Index i = 0; i < n; ++i)
            p += market.budgets[static_cast<std::size_t>(i)] *
                 std::get<CobbDouglas>(market.utilities[static_cast<std::size_t>(i)]).weights;
        Allocation x(n, m);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& a = std::get<CobbDouglas>(market.utilities[static_cast<std::size_t>(i)]).weights;
            for (Eigen::Index j = 0; j < m; ++j) x(i, j) = market.budgets[static_cast<std::size_t>(i)] * a[j] / p[j];
        }
        return package(market, std::move(x), std::move(p), true, 0);
    }
    return damped_price_iteration(market, options, money);
}

EquilibriumResult solve_exchange_eq(const MarketSpec& market, const SolverOptions& options) {
    if (market.mode != MarketMode::Exchange)
        throw Error(Errc::ModeMismatch, "solve_exchange_eq needs an exchange market");
    return damped_price_iteration(market, options, 1.0);
}

EquilibriumResult solve_equilibrium(const MarketSpec& market, const SolverOptions& options) {
    return market.mode == MarketMode::Fisher ? solve_fisher_eq(market, options) : solve_exchange_eq(market, options);
}

EquilibriumReport verify_fisher_equilibrium(const MarketSpec& market, const Allocation& x, const PriceVector& p,
                                            double tol) {
    if (market.mode != MarketMode::Fisher) throw Error(Errc::ModeMismatch, "Fisher verifier needs a Fisher market");
    return verify(market, x, p, tol);
}

EquilibriumReport verify_exchange_equilibrium(const MarketSpec& market, const Allocation& x, const PriceVector& p,
                                              double tol) {
    if (market.mode != MarketMode::Exchange)
        throw Error(Errc::ModeMismatch, "exchange verifier needs an exchange market");
    return verify(market, x, p.sum() > 0.0 ? PriceVector(p / p.sum()) : p, tol);
}

}  // namespace prd
