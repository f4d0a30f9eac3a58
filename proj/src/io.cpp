#include "prd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <variant>

#include "prd/error.hpp"

namespace prd::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& why) {
    throw Error(Errc::ParseError, field + ": " + why);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) parse_fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(path + "." + key, "missing");
    return *it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) parse_fail(path, "expected a number");
    return v.get<double>();
}

Vector as_vector(const json& v, const std::string& path) {
    if (!v.is_array()) parse_fail(path, "expected an array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k)
        out[static_cast<Eigen::Index>(k)] = as_number(v[k], path + "[" + std::to_string(k) + "]");
    return out;
}

UtilitySpec utility_from_json(const json& doc, const std::string& path) {
    const json& family = require(doc, "family", path);
    if (!family.is_string()) parse_fail(path + ".family", "expected a string");
    const std::string name = family.get<std::string>();
    Family fam{};
    try {
        fam = parse_family(name);
    } catch (const Error& err) {
        parse_fail(path + ".family", err.detail());
    }
    Vector weights = as_vector(require(doc, "weights", path), path + ".weights");
    // Parameter-range problems surface as UtilityParamInvalid, not ParseError.
    switch (fam) {
        case Family::CobbDouglas: return make_cobb_douglas(std::move(weights));
        case Family::Ces: return make_ces(std::move(weights), as_number(require(doc, "rho", path), path + ".rho"));
        case Family::SeparablePower:
            return make_separable_power(std::move(weights), as_vector(require(doc, "rhos", path), path + ".rhos"));
    }
    parse_fail(path + ".family", "unknown family");
}

json utility_to_json(const UtilitySpec& u) {
    json doc;
    doc["family"] = std::string(family_name(u));
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            doc["weights"] = vector_json(f.weights);
            if constexpr (std::is_same_v<T, Ces>) doc["rho"] = f.rho;
            if constexpr (std::is_same_v<T, SeparablePower>) doc["rhos"] = vector_json(f.rhos);
        },
        u);
    return doc;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw Error(Errc::ParseError, "trace line " + std::to_string(line_no) + ": bad number '" + cell + "'");
    return value;
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

Family parse_family(const std::string& name) {
    if (name == "cobb_douglas") return Family::CobbDouglas;
    if (name == "ces") return Family::Ces;
    if (name == "separable_power") return Family::SeparablePower;
    throw Error(Errc::ParseError, "unknown utility family '" + name + "'");
}

json vector_json(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
    return rows;
}

json market_to_json(const MarketSpec& spec) {
    json doc;
    doc["mode"] = std::string(to_string(spec.mode));
    doc["goods"] = spec.n_goods;
    json buyers = json::array();
    for (std::size_t i = 0; i < spec.n_agents(); ++i) {
        json b;
        if (spec.mode == MarketMode::Fisher) {
            b["budget"] = spec.budgets[i];
        } else {
            b["endowment_goods"] = spec.endowments[i];
            b["alpha"] = spec.laziness[i];
        }
        b["utility"] = utility_to_json(spec.utilities[i]);
        buyers.push_back(std::move(b));
    }
    doc["buyers"] = std::move(buyers);
    return doc;
}

MarketSpec market_from_json(const json& doc) {
    const json& mode = require(doc, "mode", "$");
    if (!mode.is_string()) parse_fail("$.mode", "expected \"fisher\" or \"exchange\"");
    MarketSpec spec;
    const std::string mode_name = mode.get<std::string>();
    if (mode_name == "fisher") {
        spec.mode = MarketMode::Fisher;
    } else if (mode_name == "exchange") {
        spec.mode = MarketMode::Exchange;
    } else {
        parse_fail("$.mode", "expected \"fisher\" or \"exchange\", got \"" + mode_name + "\"");
    }

    const json& goods = require(doc, "goods", "$");
    if (!goods.is_number_integer() || goods.get<long long>() < 1) parse_fail("$.goods", "expected a positive integer");
    spec.n_goods = goods.get<std::size_t>();

    const json& buyers = require(doc, "buyers", "$");
    if (!buyers.is_array() || buyers.empty()) parse_fail("$.buyers", "expected a non-empty array");
    for (std::size_t i = 0; i < buyers.size(); ++i) {
        const std::string path = "$.buyers[" + std::to_string(i) + "]";
        const json& b = buyers[i];
        try {
            spec.utilities.push_back(utility_from_json(require(b, "utility", path), path + ".utility"));
        } catch (const Error& err) {
            if (err.code() == Errc::ParseError) throw;
            throw Error(err.code(), "buyer " + std::to_string(i) + ": " + err.detail());
        }
        if (spec.mode == MarketMode::Fisher) {
            if (b.contains("endowment_goods") || b.contains("alpha"))
                parse_fail(path, "Fisher buyers take a budget, not endowment_goods/alpha");
            spec.budgets.push_back(as_number(require(b, "budget", path), path + ".budget"));
        } else {
            if (b.contains("budget")) parse_fail(path, "exchange agents take endowment_goods/alpha, not a budget");
            const json& goods_owned = require(b, "endowment_goods", path);
            if (!goods_owned.is_array()) parse_fail(path + ".endowment_goods", "expected an array of good indices");
            std::vector<std::size_t> owned;
            for (const auto& g : goods_owned) {
                if (!g.is_number_integer() || g.get<long long>() < 0)
                    parse_fail(path + ".endowment_goods", "expected nonnegative integers");
                owned.push_back(g.get<std::size_t>());
            }
            spec.endowments.push_back(std::move(owned));
            spec.laziness.push_back(as_number(require(b, "alpha", path), path + ".alpha"));
        }
    }
    validate_market(spec);
    return spec;
}

MarketSpec parse_market(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw Error(Errc::ParseError, "line " + std::to_string(line_of(text, err.byte)) + ": " + err.what());
    }
    return market_from_json(doc);
}

MarketSpec load_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_market(buf.str());
}

void write_market(const std::filesystem::path& path, const MarketSpec& spec) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
    out << market_to_json(spec).dump(2) << '\n';
}

MarketSpec generate_market(const GenOptions& options) {
    if (options.n < 1 || options.m < 1) throw Error(Errc::InvalidArgument, "n and m must be at least 1");
    if (options.mode == MarketMode::Exchange && options.m < options.n)
        throw Error(Errc::InvalidArgument, "exchange instances need at least one good per agent (m >= n)");

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> log_weight(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> budget(0.5, 2.0);
    std::uniform_real_distribution<double> exponent(0.2, 0.8);
    const auto m = static_cast<Eigen::Index>(options.m);

    std::vector<UtilitySpec> utilities;
    std::vector<double> budgets;
    for (std::size_t i = 0; i < options.n; ++i) {
        Vector w(m);
        for (Eigen::Index j = 0; j < m; ++j) w[j] = std::exp(log_weight(rng));
        w /= w.sum();
        switch (options.family) {
            case Family::CobbDouglas: utilities.emplace_back(make_cobb_douglas(std::move(w))); break;
            case Family::Ces: utilities.emplace_back(make_ces(std::move(w), exponent(rng))); break;
            case Family::SeparablePower: {
                Vector rhos(m);
                for (Eigen::Index j = 0; j < m; ++j) rhos[j] = exponent(rng);
                utilities.emplace_back(make_separable_power(std::move(w), std::move(rhos)));
                break;
            }
        }
        budgets.push_back(budget(rng));
    }
    if (options.mode == MarketMode::Fisher) return make_fisher_market(std::move(utilities), std::move(budgets));

    std::vector<std::size_t> goods(options.m);
    std::iota(goods.begin(), goods.end(), std::size_t{0});
    std::shuffle(goods.begin(), goods.end(), rng);
    std::vector<std::vector<std::size_t>> endowments(options.n);
    std::uniform_int_distribution<std::size_t> pick(0, options.n - 1);
    for (std::size_t k = 0; k < goods.size(); ++k) endowments[k < options.n ? k : pick(rng)].push_back(goods[k]);
    for (auto& owned : endowments) std::sort(owned.begin(), owned.end());
    return make_exchange_market(std::move(utilities), std::move(endowments),
                                std::vector<double>(options.n, options.alpha));
}

void write_trace_csv(std::ostream& out, const DynamicsTrace& trace, std::size_t n_agents, std::size_t n_goods,
                     const std::vector<double>& potentials, bool full_dump) {
    const bool exchange = trace.mode == MarketMode::Exchange;
    out << "iteration";
    for (std::size_t j = 0; j < n_goods; ++j) out << ",p_" << j + 1;
    out << ",potential,max_price_delta";
    if (exchange) out << ",max_alloc_delta";
    if (full_dump) {
        if (exchange)
            for (std::size_t i = 0; i < n_agents; ++i) out << ",B_" << i + 1;
        for (std::size_t i = 0; i < n_agents; ++i)
            for (std::size_t j = 0; j < n_goods; ++j) out << ",b_" << i + 1 << '_' << j + 1;
        for (std::size_t i = 0; i < n_agents; ++i)
            for (std::size_t j = 0; j < n_goods; ++j) out << ",x_" << i + 1 << '_' << j + 1;
    }
    out << '\n';

    auto cell = [&](double v) {
        out << ',';
        if (!std::isnan(v)) out << format_double(v);
    };
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const auto& rec = trace.records[k];
        out << rec.iteration;
        for (Eigen::Index j = 0; j < rec.prices.size(); ++j) cell(rec.prices[j]);
        cell(k < potentials.size() ? potentials[k] : std::numeric_limits<double>::quiet_NaN());
        cell(rec.max_price_delta);
        if (exchange) cell(rec.max_alloc_delta);
        if (full_dump) {
            if (exchange)
                for (Eigen::Index i = 0; i < rec.budgets.size(); ++i) cell(rec.budgets[i]);
            for (Eigen::Index e = 0; e < rec.bids.size(); ++e) cell(rec.bids.data()[e]);
            for (Eigen::Index e = 0; e < rec.alloc.size(); ++e) cell(rec.alloc.data()[e]);
        }
        out << '\n';
    }
}

DynamicsTrace read_trace_csv(std::istream& in, const MarketSpec& market) {
    const std::size_t n = market.n_agents();
    const std::size_t m = market.n_goods;
    const bool exchange = market.mode == MarketMode::Exchange;

    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::ParseError, "trace is empty");
    const auto header = split_csv_line(line);
    const std::size_t base = 1 + m + 2 + (exchange ? 1 : 0);
    const std::size_t expected = base + (exchange ? n : 0) + 2 * n * m;
    if (header.size() != expected)
        throw Error(Errc::ParseError, "trace header has " + std::to_string(header.size()) + " columns, expected " +
                                          std::to_string(expected) + " (full dump for this market)");
    if (header.front() != "iteration" || header[1 + m] != "potential")
        throw Error(Errc::ParseError, "trace header does not match this market");

    DynamicsTrace trace;
    trace.mode = market.mode;
    std::size_t line_no = 1;
    const auto ni = static_cast<Eigen::Index>(n);
    const auto mi = static_cast<Eigen::Index>(m);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != expected)
            throw Error(Errc::ParseError, "trace line " + std::to_string(line_no) + " has " +
                                              std::to_string(cells.size()) + " cells");
        TraceRecord rec;
        rec.iteration = static_cast<std::size_t>(parse_cell(cells[0], line_no));
        rec.prices.resize(mi);
        for (Eigen::Index j = 0; j < mi; ++j) rec.prices[j] = parse_cell(cells[1 + static_cast<std::size_t>(j)], line_no);
        rec.max_price_delta = parse_cell(cells[2 + m], line_no);
        if (exchange) rec.max_alloc_delta = parse_cell(cells[3 + m], line_no);
        std::size_t c = base;
        if (exchange) {
            rec.budgets.resize(ni);
            for (Eigen::Index i = 0; i < ni; ++i) rec.budgets[i] = parse_cell(cells[c++], line_no);
        }
        rec.bids.resize(ni, mi);
        for (Eigen::Index e = 0; e < rec.bids.size(); ++e) rec.bids.data()[e] = parse_cell(cells[c++], line_no);
        rec.alloc.resize(ni, mi);
        for (Eigen::Index e = 0; e < rec.alloc.size(); ++e) rec.alloc.data()[e] = parse_cell(cells[c++], line_no);
        trace.records.push_back(std::move(rec));
    }
    if (trace.records.empty()) throw Error(Errc::ParseError, "trace has no records");
    if (trace.records.size() > 1) trace.record_every = trace.records[1].iteration - trace.records[0].iteration;
    return trace;
}

json equilibrium_json(const EquilibriumResult& eq) {
    json doc;
    doc["converged"] = eq.converged;
    doc["iterations"] = eq.iterations;
    doc["prices"] = vector_json(eq.p_star);
    doc["allocation"] = matrix_json(eq.x_star);
    doc["bids"] = matrix_json(eq.b_star);
    doc["residuals"] = {{"clearing", eq.residuals.clearing},
                        {"optimality_gap", eq.residuals.optimality_gap},
                        {"budget_gap", eq.residuals.budget_gap}};
    return doc;
}

json report_json(const DiagnosticsReport& report) {
    json doc;
    doc["pass"] = report.pass;
    doc["slack"] = report.slack;
    doc["potential_series"] = report.potential_series;
    json violations = json::array();
    for (const auto& v : report.monotone_violations) violations.push_back({{"iteration", v.iteration}, {"excess", v.excess}});
    doc["monotone_violations"] = std::move(violations);
    json rate = json::array();
    for (const auto& row : report.avg_price_bound) rate.push_back({row.horizon, row.lhs, row.rhs});
    doc["avg_price_bound"] = std::move(rate);
    json rate_violations = json::array();
    for (const auto& v : report.rate_violations)
        rate_violations.push_back({{"horizon", v.iteration}, {"excess", v.excess}});
    doc["rate_violations"] = std::move(rate_violations);
    if (std::isfinite(report.lemma_gap_min)) doc["lemma_gap_min"] = report.lemma_gap_min;
    return doc;
}

}  // namespace prd::io
