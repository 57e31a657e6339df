#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "vform/dampc.hpp"
#include "vform/flock.hpp"
#include "vform/smc.hpp"
#include "vform/trace.hpp"

namespace vform {

// Plain-text trajectory with enough information to replay every step:
// header, initial state, then one block per step with the accelerations,
// the disturbance and the resulting state. All numbers use 17 significant
// digits, so parsed values round-trip exactly.
struct TrajectoryData {
    std::string mode;
    std::uint64_t seed = 0;
    std::string digest;
    FlockParams params;
    PlanTrace trace;
};

void write_trajectory(std::ostream& out, const TrajectoryData& td);
TrajectoryData read_trajectory(std::istream& in); // ConfigError on malformed input

// Re-applies the recorded accelerations and disturbances from the initial
// state and returns the largest absolute coordinate deviation from the
// recorded states (0 when the trajectory is consistent).
double replay_deviation(const TrajectoryData& td);

// step,cost,level,delta,k,rounds rows per executed step.
void write_ledger_csv(std::ostream& out, const dampc::LevelLedger& ledger);

// index,seed,success,duration,avg_horizon,avg_neighborhood,final_cost rows.
void write_runs_csv(std::ostream& out, const smc::RunStats& stats);

} // namespace vform
