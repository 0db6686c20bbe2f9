#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "quasifix/contraction.hpp"
#include "quasifix/picard.hpp"
#include "quasifix/report.hpp"
#include "quasifix/space_spec.hpp"

namespace quasifix {

/// Process exit codes shared by every subcommand.
///   0  success; for analysis commands, the map is in the requested class
///   1  input error (unreadable file, parse failure, invalid flag value)
///   2  input validated but the map is not contractive for the request
///   3  no convergence within max-iters, or a certified guarantee failed
enum ExitCode : int {
    exit_ok = 0,
    exit_input_error = 1,
    exit_not_contractive = 2,
    exit_no_convergence = 3,
};

struct WorkbenchOptions {
    /// Additive tolerance for bound certificates (see QUASIFIX_TOL).
    double tolerance = kDefaultBoundTolerance;
};

struct CommandResult {
    int exit_code = exit_ok;
    RunReport report;
};

CommandResult run_validate(const std::string& path, const WorkbenchOptions& opts = {});

CommandResult run_classify(const std::string& path, const std::string& terms, Index power,
                           const WorkbenchOptions& opts = {});

CommandResult run_solve(const std::string& path, std::optional<Index> start,
                        std::optional<Index> max_iters, const WorkbenchOptions& opts = {});

CommandResult run_mv_solve(const std::string& path, double a, std::optional<Index> start,
                           const WorkbenchOptions& opts = {});

CommandResult run_bound(const std::string& path, std::optional<Index> start,
                        std::optional<Index> horizon, Index power,
                        const WorkbenchOptions& opts = {});

/// Emits a generated space as a space-spec document (both formats print the
/// raw document so it can be piped straight into the other commands).
CommandResult run_gen(Index points, double density, std::uint64_t seed);

/// Full verification pipeline: validate, classify all presets, solve from
/// every start, and check every quantitative guarantee. Exit 0 only when the
/// generalized modulus is < 1 and every certificate holds.
CommandResult run_check(const std::string& path, const WorkbenchOptions& opts = {});

}  // namespace quasifix
