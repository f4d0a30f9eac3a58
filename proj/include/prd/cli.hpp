#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prd/io.hpp"
#include "prd/kernels.hpp"

namespace prd::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;   // bad flags, unreadable or invalid market, runtime error
inline constexpr int kExitMaxIters = 2;     // dynamics stopped on max_iters
inline constexpr int kExitNotConverged = 3; // equilibrium oracle did not converge
inline constexpr int kExitCheckFailed = 4;  // invariant or diagnostic check failed

struct RunConfig {
    std::filesystem::path market;
    std::size_t max_iters = 20000;
    double price_tol = 1e-12;
    std::size_t record_every = 1;
    std::filesystem::path out = ".";
    std::uint64_t seed = 0;
    bool diagnostics = false;
    bool full_dump = false;
    std::size_t batch = 0;
    // Instance parameters for batch runs, which generate one market per seed.
    io::GenOptions gen;
    Backend backend = Backend::OpenMP;
};

int cmd_run(const RunConfig& config);
int cmd_solve(const RunConfig& config);
int cmd_gen(const io::GenOptions& options, const std::optional<std::filesystem::path>& out);
/// Replays a full-dump trace through the diagnostics.
int cmd_verify(const RunConfig& config, const std::filesystem::path& trace_path);

/// Parses argv-style arguments (without the program name) and dispatches.
int run_cli(const std::vector<std::string>& args);

}  // namespace prd::cli
