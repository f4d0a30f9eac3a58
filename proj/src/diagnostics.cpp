#include "prd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prd/demand.hpp"
#include "prd/error.hpp"

namespace prd {
namespace {

void require_consecutive(const DynamicsTrace& trace) {
    if (trace.records.empty() || !trace.consecutive())
        throw Error(Errc::NonConsecutiveTrace, "diagnostics need every iteration recorded (record_every = 1)");
}

void require_positive(const double* data, Eigen::Index size, const char* what) {
    for (Eigen::Index k = 0; k < size; ++k) {
        if (!(data[k] > 0.0))
            throw Error(Errc::NonPositiveEntry, std::string(what) + " entry " + std::to_string(k) + " = " +
                                                    std::to_string(data[k]));
    }
}

}  // namespace

double kl_divergence(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw Error(Errc::LengthMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    require_positive(a.data(), a.size(), "first argument");
    require_positive(b.data(), b.size(), "second argument");
    double total = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) total += a[k] * std::log(a[k] / b[k]);
    return total;
}

double fisher_potential(const BidMatrix& b_star, const BidMatrix& b_t) {
    if (b_star.rows() != b_t.rows() || b_star.cols() != b_t.cols())
        throw Error(Errc::ShapeMismatch, "bid matrices differ in shape");
    require_positive(b_star.data(), b_star.size(), "equilibrium bid");
    require_positive(b_t.data(), b_t.size(), "bid");
    double total = 0.0;
    for (Eigen::Index k = 0; k < b_star.size(); ++k) total += b_star.data()[k] * std::log(b_star.data()[k] / b_t.data()[k]);
    return total;
}

DiagnosticsReport check_potential_decrease(const DynamicsTrace& trace, const EquilibriumResult& eq, double slack) {
    require_consecutive(trace);
    DiagnosticsReport report;
    report.slack = slack;
    report.potential_series.reserve(trace.records.size());
    for (const auto& rec : trace.records) report.potential_series.push_back(fisher_potential(eq.b_star, rec.bids));

    for (std::size_t t = 0; t + 1 < trace.records.size(); ++t) {
        const double bound = report.potential_series[t] - kl_divergence(eq.p_star, trace.records[t].prices);
        const double excess = report.potential_series[t + 1] - bound - slack;
        if (excess > 0.0) report.monotone_violations.push_back({t, excess});
    }
    report.pass = report.monotone_violations.empty();
    return report;
}

std::vector<RateRow> check_avg_price_rate(const DynamicsTrace& trace, const EquilibriumResult& eq,
                                          const BidMatrix& b0) {
    require_consecutive(trace);
    const double initial = fisher_potential(eq.b_star, b0);
    std::vector<RateRow> rows;
    rows.reserve(trace.records.size());
    Vector running = Vector::Zero(eq.p_star.size());
    for (std::size_t t = 1; t < trace.records.size(); ++t) {
        running += trace.records[t].prices;
        const auto horizon = static_cast<double>(t);
        const Vector mean = running / horizon;
        rows.push_back({t, kl_divergence(eq.p_star, mean), initial / horizon});
    }
    return rows;
}

double lemma_gap(const UtilitySpec& u, const PriceVector& p, const PriceVector& q, double e) {
    for (Eigen::Index j = 0; j < q.size(); ++j)
        if (!(q[j] > 0.0)) throw Error(Errc::NonPositivePrice, "q_" + std::to_string(j) + " = " + std::to_string(q[j]));
    const Vector xp = demand(u, p, e).x;
    const Vector xq = demand(u, q, e).x;
    double log_term = 0.0;
    double shift = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        log_term += p[j] * xp[j] * std::log(p[j] / q[j]);
        shift += p[j] * (xq[j] - xp[j]);
    }
    return log_term - shift;
}

double lemma_33_check(const MarketSpec& market, const EquilibriumResult& eq, const Allocation& alloc) {
    const auto n = static_cast<Eigen::Index>(market.n_agents());
    const auto m = static_cast<Eigen::Index>(market.n_goods);
    if (alloc.rows() != n || alloc.cols() != m) throw Error(Errc::ShapeMismatch, "allocation shape");
    for (Eigen::Index k = 0; k < alloc.size(); ++k)
        if (!(alloc.data()[k] > 0.0)) throw Error(Errc::BoundaryBundle, "allocation has a zero entry");
    const double clearing = (alloc.colwise().sum().array() - 1.0).abs().maxCoeff();
    if (clearing > 1e-9)
        throw Error(Errc::InfeasibleAllocation, "column sums deviate from one by " + std::to_string(clearing));

    const Vector wealth = market.mode == MarketMode::Fisher
                              ? Vector(Eigen::Map<const Vector>(market.budgets.data(), n))
                              : Vector(eq.b_star.rowwise().sum());
    double gap = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector q = corresponding_price(market.utilities[static_cast<std::size_t>(i)],
                                             alloc.row(i).transpose(), wealth[i]);
        for (Eigen::Index j = 0; j < m; ++j)
            gap += eq.x_star(i, j) * eq.p_star[j] * (std::log(eq.p_star[j]) - std::log(q[j]));
    }
    return gap;
}

double exchange_potential(const BidMatrix& bids, const Vector& spend, const LazyEquilibrium& eq) {
    if (bids.rows() != eq.bids.rows() || bids.cols() != eq.bids.cols() || spend.size() != eq.spend.size())
        throw Error(Errc::ShapeMismatch, "state does not match the equilibrium");
    double total = fisher_potential(eq.bids, bids);
    require_positive(spend.data(), spend.size(), "spend");
    for (Eigen::Index i = 0; i < spend.size(); ++i) {
        const double keep = (1.0 - eq.alpha[i]) / eq.alpha[i];
        total += keep * eq.spend[i] * std::log(eq.spend[i] / spend[i]);
    }
    return total;
}

DiagnosticsReport fisher_diagnostics(const MarketSpec& market, const DynamicsTrace& trace,
                                     const EquilibriumResult& eq, double slack) {
    DiagnosticsReport report = check_potential_decrease(trace, eq, slack);
    report.avg_price_bound = check_avg_price_rate(trace, eq, trace.records.front().bids);
    for (const auto& row : report.avg_price_bound) {
        const double excess = row.lhs - row.rhs - slack;
        if (excess > 0.0) report.rate_violations.push_back({row.horizon, excess});
    }
    for (const auto& rec : trace.records)
        report.lemma_gap_min = std::min(report.lemma_gap_min, -lemma_33_check(market, eq, rec.alloc));
    report.pass = report.monotone_violations.empty() && report.rate_violations.empty() &&
                  report.lemma_gap_min >= -slack;
    return report;
}

DiagnosticsReport exchange_diagnostics(const MarketSpec& market, const DynamicsTrace& trace,
                                       const LazyEquilibrium& eq, double slack) {
    require_consecutive(trace);
    const Vector alpha = Eigen::Map<const Vector>(market.laziness.data(), static_cast<Eigen::Index>(market.laziness.size()));
    DiagnosticsReport report;
    report.slack = slack;
    for (const auto& rec : trace.records) {
        const Vector spend = (alpha.array() * rec.budgets.array()).matrix();
        report.potential_series.push_back(exchange_potential(rec.bids, spend, eq));
    }
    for (std::size_t t = 0; t + 1 < report.potential_series.size(); ++t) {
        const double excess = report.potential_series[t + 1] - report.potential_series[t] - slack;
        if (excess > 0.0) report.monotone_violations.push_back({t, excess});
    }
    report.pass = report.monotone_violations.empty();
    return report;
}

}  // namespace prd
