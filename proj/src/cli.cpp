#include "prd/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "prd/diagnostics.hpp"
#include "prd/equilibrium.hpp"
#include "prd/error.hpp"
#include "prd/lazy_exchange.hpp"
#include "prd/pr_fisher.hpp"

namespace prd::cli {

using nlohmann::json;

namespace {

struct InvariantSummary {
    double row_sum_error = 0.0;   // relative, against e_i or alpha_i B_i
    double clearing_error = 0.0;  // max |sum_i x_ij - 1|
    double money_drift = 0.0;     // exchange: max |sum_i B_i - 1|
    bool positive = true;

    bool ok() const {
        return positive && row_sum_error <= 1e-12 && clearing_error <= 1e-12 && money_drift <= 1e-10;
    }
};

InvariantSummary check_invariants(const MarketSpec& market, const DynamicsTrace& trace) {
    InvariantSummary s;
    for (const auto& rec : trace.records) {
        if (!(rec.bids.array() > 0.0).all()) s.positive = false;
        for (Eigen::Index i = 0; i < rec.bids.rows(); ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double target = market.is_fisher() ? market.budgets[k] : market.laziness[k] * rec.budgets[i];
            s.row_sum_error = std::max(s.row_sum_error, std::abs(rec.bids.row(i).sum() - target) / target);
        }
        s.clearing_error =
            std::max(s.clearing_error, (rec.alloc.colwise().sum().array() - 1.0).abs().maxCoeff());
        if (!market.is_fisher()) s.money_drift = std::max(s.money_drift, std::abs(rec.budgets.sum() - 1.0));
    }
    return s;
}

DynamicsTrace thin(const DynamicsTrace& full, std::size_t record_every) {
    if (record_every <= 1) return full;
    DynamicsTrace out = full;
    out.record_every = record_every;
    out.records.clear();
    for (std::size_t k = 0; k < full.records.size(); ++k) {
        if (full.records[k].iteration % record_every == 0 || k + 1 == full.records.size())
            out.records.push_back(full.records[k]);
    }
    return out;
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

int report_error(const std::filesystem::path& out_dir, const std::string& code, const std::string& message) {
    spdlog::error("{}: {}", code, message);
    std::cerr << code << ": " << message << '\n';
    std::error_code ec;
    if (!out_dir.empty() && std::filesystem::is_directory(out_dir, ec)) {
        try {
            write_json(out_dir / "error.json", {{"error", code}, {"message", message}});
        } catch (...) {
        }
    }
    return kExitInputError;
}

template <class Fn>
int guarded(const std::filesystem::path& out_dir, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& err) {
        return report_error(out_dir, std::string(to_string(err.code())), err.detail());
    } catch (const std::exception& err) {
        return report_error(out_dir, "RuntimeError", err.what());
    }
}

int run_one(const MarketSpec& market, const RunConfig& config) {
    std::filesystem::create_directories(config.out);
    const StopRule stop(config.max_iters, config.price_tol);
    const std::size_t run_every = config.diagnostics ? 1 : config.record_every;

    spdlog::info("running {} market: {} agents, {} goods", to_string(market.mode), market.n_agents(), market.n_goods);
    const DynamicsTrace full =
        market.is_fisher()
            ? run_fisher(market, default_initial_bids(market), stop, run_every, config.backend)
            : run_exchange(market, default_initial_exchange(market), stop, run_every, config.backend);

    const InvariantSummary inv = check_invariants(market, full);
    const TraceRecord& last = full.final_record();

    json summary;
    summary["mode"] = std::string(to_string(market.mode));
    summary["stop_reason"] = std::string(to_string(full.stop));
    summary["iterations"] = last.iteration;
    summary["final_prices"] = io::vector_json(last.prices);
    summary["final_allocation"] = io::matrix_json(last.alloc);
    summary["price_residual"] = last.max_price_delta;
    if (!market.is_fisher()) {
        summary["alloc_residual"] = last.max_alloc_delta;
        summary["final_budgets"] = io::vector_json(last.budgets);
    }
    summary["invariants"] = {{"ok", inv.ok()},
                             {"positive_bids", inv.positive},
                             {"max_row_sum_error", inv.row_sum_error},
                             {"max_clearing_error", inv.clearing_error},
                             {"max_money_drift", inv.money_drift}};

    int status = kExitOk;
    std::vector<double> potentials;
    if (config.diagnostics) {
        const EquilibriumResult eq = solve_equilibrium(market);
        if (!eq.converged) {
            summary["diagnostics"] = {{"pass", false}, {"error", "NotConverged"}};
            status = kExitNotConverged;
        } else {
            DiagnosticsReport report;
            json extra;
            if (market.is_fisher()) {
                report = fisher_diagnostics(market, full, eq);
                extra["price_error"] = (last.prices - eq.p_star).cwiseAbs().maxCoeff();
                extra["alloc_error"] = (last.alloc - eq.x_star).cwiseAbs().maxCoeff();
            } else {
                const LazyEquilibrium lazy = to_lazy_equilibrium(market, eq.x_star, eq.p_star);
                report = exchange_diagnostics(market, full, lazy);
                extra["alloc_error"] = (last.alloc - eq.x_star).cwiseAbs().maxCoeff();
                extra["price_error"] = (last.prices / last.prices.sum() - eq.p_star).cwiseAbs().maxCoeff();
            }
            json doc = io::report_json(report);
            doc["equilibrium"] = io::equilibrium_json(eq);
            for (auto& [k, v] : extra.items()) doc[k] = v;
            write_json(config.out / "diagnostics.json", doc);
            summary["diagnostics"] = {{"pass", report.pass}};
            for (auto& [k, v] : extra.items()) summary["diagnostics"][k] = v;
            potentials = report.potential_series;
            if (!report.pass) status = kExitCheckFailed;
        }
    }

    const DynamicsTrace written = thin(full, config.record_every);
    std::vector<double> written_potentials;
    if (!potentials.empty()) {
        for (const auto& rec : written.records) written_potentials.push_back(potentials[rec.iteration]);
    }
    {
        std::ofstream csv(config.out / "trace.csv");
        if (!csv) throw Error(Errc::InvalidArgument, "cannot write trace to " + config.out.string());
        io::write_trace_csv(csv, written, market.n_agents(), market.n_goods, written_potentials, config.full_dump);
    }

    if (!inv.ok()) status = kExitCheckFailed;
    if (status == kExitOk && full.stop == StopReason::MaxIters) status = kExitMaxIters;
    summary["exit_code"] = status;
    write_json(config.out / "summary.json", summary);
    spdlog::info("stopped at t={} ({}), exit {}", last.iteration, to_string(full.stop), status);
    return status;
}

int run_batch(const RunConfig& config) {
    std::atomic<std::size_t> next{0};
    std::vector<int> codes(config.batch, kExitOk);
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(config.batch, std::thread::hardware_concurrency()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < config.batch; k = next++) {
                    RunConfig one = config;
                    one.gen.seed = config.seed + k;
                    one.out = config.out / ("seed_" + std::to_string(one.gen.seed));
                    one.backend = Backend::Serial;
                    codes[k] = guarded(one.out, [&] {
                        std::filesystem::create_directories(one.out);
                        const MarketSpec market = io::generate_market(one.gen);
                        io::write_market(one.out / "market.json", market);
                        return run_one(market, one);
                    });
                }
            });
        }
    }
    return *std::max_element(codes.begin(), codes.end());
}

void configure_logging() {
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = spdlog::stderr_logger_mt("prd");
        spdlog::set_default_logger(logger);
        spdlog::level::level_enum level = spdlog::level::warn;
        if (const char* env = std::getenv("PRD_LOG_LEVEL")) {
            const std::string name(env);
            if (name == "error") level = spdlog::level::err;
            else if (name == "warn") level = spdlog::level::warn;
            else if (name == "info") level = spdlog::level::info;
            else if (name == "debug") level = spdlog::level::debug;
        }
        spdlog::set_level(level);
    });
}

}  // namespace

int cmd_run(const RunConfig& config) {
    if (config.batch > 0) return run_batch(config);
    return guarded(config.out, [&] {
        if (config.record_every < 1) throw Error(Errc::InvalidArgument, "--record-every must be at least 1");
        const MarketSpec market = io::load_market(config.market);
        return run_one(market, config);
    });
}

int cmd_solve(const RunConfig& config) {
    return guarded(config.out, [&] {
        const MarketSpec market = io::load_market(config.market);
        std::filesystem::create_directories(config.out);
        const EquilibriumResult eq = solve_equilibrium(market);
        json doc = io::equilibrium_json(eq);
        if (eq.converged) {
            const EquilibriumReport rep = market.is_fisher()
                                              ? verify_fisher_equilibrium(market, eq.x_star, eq.p_star, 1e-8)
                                              : verify_exchange_equilibrium(market, eq.x_star, eq.p_star, 1e-8);
            doc["verification"] = {{"pass", rep.pass()},
                                   {"demand_residual", rep.demand_residual},
                                   {"oversold", rep.oversold},
                                   {"undersold", rep.undersold}};
        }
        write_json(config.out / "equilibrium.json", doc);
        if (!eq.converged) {
            std::cerr << "NotConverged: clearing residual " << eq.residuals.clearing << '\n';
            return kExitNotConverged;
        }
        return kExitOk;
    });
}

int cmd_gen(const io::GenOptions& options, const std::optional<std::filesystem::path>& out) {
    return guarded({}, [&] {
        const MarketSpec market = io::generate_market(options);
        if (out) {
            if (out->has_parent_path()) std::filesystem::create_directories(out->parent_path());
            io::write_market(*out, market);
        } else {
            std::cout << io::market_to_json(market).dump(2) << '\n';
        }
        return kExitOk;
    });
}

int cmd_verify(const RunConfig& config, const std::filesystem::path& trace_path) {
    return guarded(config.out, [&] {
        const MarketSpec market = io::load_market(config.market);
        std::ifstream in(trace_path);
        if (!in) throw Error(Errc::ParseError, "cannot open " + trace_path.string());
        const DynamicsTrace trace = io::read_trace_csv(in, market);
        std::filesystem::create_directories(config.out);

        const EquilibriumResult eq = solve_equilibrium(market);
        if (!eq.converged) {
            std::cerr << "NotConverged: equilibrium oracle failed\n";
            return kExitNotConverged;
        }
        const DiagnosticsReport report =
            market.is_fisher() ? fisher_diagnostics(market, trace, eq)
                               : exchange_diagnostics(market, trace, to_lazy_equilibrium(market, eq.x_star, eq.p_star));
        json doc = io::report_json(report);
        doc["equilibrium"] = io::equilibrium_json(eq);
        write_json(config.out / "diagnostics.json", doc);
        return report.pass ? kExitOk : kExitCheckFailed;
    });
}

int run_cli(const std::vector<std::string>& args) {
    configure_logging();

    CLI::App app{"Proportional response dynamics in Fisher and exchange markets", "prd"};
    app.require_subcommand(1);

    RunConfig config;
    std::string family = "ces";
    std::string mode = "fisher";
    std::optional<std::filesystem::path> gen_out;
    std::filesystem::path trace_path;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--max-iters", config.max_iters, "Iterates to visit")->check(CLI::PositiveNumber);
        cmd->add_option("--price-tol", config.price_tol, "Stop when the successive change drops below this")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--record-every", config.record_every, "Trace thinning")->check(CLI::PositiveNumber);
        cmd->add_flag("--diagnostics", config.diagnostics, "Solve the equilibrium and check the potentials");
        cmd->add_flag("--full-dump", config.full_dump, "Write bids and allocations into the trace");
    };

    auto* gen = app.add_subcommand("gen", "Generate a random market config");
    gen->add_option("--n", config.gen.n, "Agents")->required()->check(CLI::PositiveNumber);
    gen->add_option("--m", config.gen.m, "Goods")->required()->check(CLI::PositiveNumber);
    gen->add_option("--family", family, "cobb_douglas | ces | separable_power")->required();
    gen->add_option("--seed", config.gen.seed, "RNG seed");
    gen->add_option("--mode", mode, "fisher | exchange");
    gen->add_option("--alpha", config.gen.alpha, "Laziness for exchange instances");
    gen->add_option("--out", gen_out, "Output file (stdout when omitted)");

    auto* solve = app.add_subcommand("solve", "Compute the equilibrium of a market");
    solve->add_option("--market", config.market, "Market config")->required()->check(CLI::ExistingFile);
    solve->add_option("--out", config.out, "Output directory");

    auto* run = app.add_subcommand("run", "Run the dynamics on a market");
    run->add_option("--market", config.market, "Market config")->check(CLI::ExistingFile);
    run->add_option("--out", config.out, "Output directory");
    run->add_option("--seed", config.seed, "First seed for --batch");
    run->add_option("--batch", config.batch, "Generate and run this many seeded instances in parallel");
    run->add_option("--n", config.gen.n, "Agents for --batch");
    run->add_option("--m", config.gen.m, "Goods for --batch");
    run->add_option("--family", family, "Family for --batch");
    run->add_option("--mode", mode, "Mode for --batch");
    add_run_flags(run);

    auto* verify = app.add_subcommand("verify", "Replay a full-dump trace through the diagnostics");
    verify->add_option("--market", config.market, "Market config")->required()->check(CLI::ExistingFile);
    verify->add_option("--trace", trace_path, "trace.csv written with --full-dump")->required()->check(CLI::ExistingFile);
    verify->add_option("--out", config.out, "Output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? kExitOk : kExitInputError;
    }

    try {
        config.gen.family = io::parse_family(family);
        if (mode == "fisher") {
            config.gen.mode = MarketMode::Fisher;
        } else if (mode == "exchange") {
            config.gen.mode = MarketMode::Exchange;
        } else {
            throw Error(Errc::InvalidArgument, "--mode must be fisher or exchange");
        }
    } catch (const Error& err) {
        std::cerr << err.what() << '\n';
        return kExitInputError;
    }

    if (*gen) return cmd_gen(config.gen, gen_out);
    if (*solve) return cmd_solve(config);
    if (*verify) return cmd_verify(config, trace_path);
    if (config.batch == 0 && config.market.empty()) {
        std::cerr << "run: --market is required unless --batch is given\n";
        return kExitInputError;
    }
    return cmd_run(config);
}

}  // namespace prd::cli
