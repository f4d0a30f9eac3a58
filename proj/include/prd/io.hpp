#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prd/diagnostics.hpp"
#include "prd/equilibrium.hpp"
#include "prd/market.hpp"
#include "prd/trace.hpp"

namespace prd::io {

/// Shortest decimal that parses back to the same double; "nan"/"inf" for non-finite.
std::string format_double(double value);

// Market config documents:
//   {"mode": "fisher" | "exchange", "goods": m,
//    "buyers": [{"budget": e,                      (fisher)
//                "endowment_goods": [j, ...],      (exchange, 0-based)
//                "alpha": a,                       (exchange)
//                "utility": {"family": "cobb_douglas" | "ces" | "separable_power",
//                            "weights": [...], "rho": r | "rhos": [...]}}]}
nlohmann::json market_to_json(const MarketSpec& spec);
/// Throws Error(ParseError) naming the offending field, or any validate_market error.
MarketSpec market_from_json(const nlohmann::json& doc);
MarketSpec parse_market(const std::string& text);
MarketSpec load_market(const std::filesystem::path& path);
void write_market(const std::filesystem::path& path, const MarketSpec& spec);

enum class Family { CobbDouglas, Ces, SeparablePower };
Family parse_family(const std::string& name);

struct GenOptions {
    std::size_t n = 2;
    std::size_t m = 2;
    Family family = Family::Ces;
    std::uint64_t seed = 0;
    MarketMode mode = MarketMode::Fisher;
    double alpha = 0.5;
};

/// Weights log-uniform in [0.1, 10] then normalized per agent, budgets uniform in
/// [0.5, 2], exponents uniform in [0.2, 0.8]. Exchange instances give every agent at
/// least one good (needs m >= n). Deterministic for a fixed seed.
MarketSpec generate_market(const GenOptions& options);

/// CSV trace: iteration, p_1..p_m, potential, max_price_delta[, max_alloc_delta]
/// and, with full_dump, B_1..B_n (exchange), b_i_j and x_i_j. Missing values are empty.
void write_trace_csv(std::ostream& out, const DynamicsTrace& trace, std::size_t n_agents, std::size_t n_goods,
                     const std::vector<double>& potentials, bool full_dump);

/// Reads a trace written with full_dump; throws ParseError otherwise.
DynamicsTrace read_trace_csv(std::istream& in, const MarketSpec& market);

nlohmann::json vector_json(const Vector& v);
nlohmann::json matrix_json(const Matrix& m);
nlohmann::json equilibrium_json(const EquilibriumResult& eq);
nlohmann::json report_json(const DiagnosticsReport& report);

}  // namespace prd::io
