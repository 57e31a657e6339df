#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "vform/config.hpp"
#include "vform/smc.hpp"

namespace vform {

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::string out_dir = "out";
    int workers = 1;
};

// Resolves the initial state for a mode: sampled for planners, the pinned
// (or analytic) V fixture for games.
FlockState initial_state_for(Mode mode, const ExperimentConfig& cfg,
                             std::uint64_t run_seed);

// Executes one run of a single-run mode with all randomness derived from
// run_seed; fills the record and optionally the full trace.
smc::RunRecord execute_single(Mode mode, const ExperimentConfig& cfg,
                              std::uint64_t run_seed, PlanTrace* trace_out,
                              dampc::LevelLedger* ledger_out);

// Runs the configured experiment, writing summary.json (always), plus
// trajectory.txt / ledger.csv for single-run modes and runs.csv for batches,
// into out_dir. Returns the process exit code (0 = ran to completion).
int run_experiment(const ExperimentConfig& cfg, const CliOverrides& overrides,
                   std::ostream& log);

} // namespace vform
