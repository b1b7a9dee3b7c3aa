#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "freshness/analytic.hpp"
#include "freshness/cli/config.hpp"
#include "freshness/simulator.hpp"
#include "freshness/solver.hpp"

namespace freshness::cli {

// Exit-code contract of the freshness tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// One point of the three-policy comparison.
struct SweepRow {
    double x = 0.0; // value of the swept source parameter
    double i_opt = 0.0;
    double i_zero_wait = 0.0;
    double i_uniform_mean = 0.0;
    double i_uniform_stderr = 0.0;
};

/// Optimal (solver), zero-wait (exact) and uniform (simulated) time-average
/// mutual information at every grid point of config.sweep_grid. Simulation
/// runs for all (point, seed) pairs share one worker pool; rows come back in
/// grid order.
std::vector<SweepRow> compute_sweep(const ExperimentConfig& config, std::size_t workers = 0);

void write_sweep_csv(std::ostream& out, const std::string& variable, const std::vector<SweepRow>& rows);

struct OracleCheckRow {
    std::string label;
    double beta_solver = 0.0;
    double beta_oracle = 0.0;
    double deviation = 0.0;
    double solver_ratio = 0.0; // renewal average of the solver's waiting function
    WaitingFunction solver_waiting;
    WaitingFunction oracle_waiting;
};

struct OracleCheckReport {
    std::vector<OracleCheckRow> rows;
    double max_deviation = 0.0;
    std::size_t worst = 0;
    bool pass = false;
};

inline constexpr double kOracleTolerance = 1e-8;

/// Solver vs brute-force oracle over the random suite (mode = random) or the
/// configured penalty and distribution (mode = config).
OracleCheckReport run_oracle_check(const ExperimentConfig& config);

/// CLI entry point: parses argv, runs the subcommand, returns the exit code.
/// CSV goes to --out (or output.path) when given, else to `out`; reports and
/// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace freshness::cli
