#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vform/actions.hpp"
#include "vform/flock.hpp"
#include "vform/pso.hpp"
#include "vform/trace.hpp"

namespace vform {
namespace dampc {

// Distributed adaptive-neighborhood MPC: per step, birds agree on a joint
// plan through consensus rounds of local adaptive-horizon optimizations; the
// neighborhood size shrinks while levels commit and grows back on stalls.
struct DampcConfig {
    double threshold = 0.1; // phi
    int h_max = 3;          // per-neighborhood horizon cap
    int max_steps = 60;     // m: total step budget
    int beta = 100;         // swarm scale: p = 2 * beta * h * |subflock|
    int k_min = 2;
    int k_max = 7;          // clamped to the flock size at run time
    PsoConfig pso;          // particle_count is overridden by the schedule
};

// Plan proposed for one neighborhood. actions is indexed by bird id (empty
// for non-members); member entries all have length `horizon`.
struct NeighborhoodSolution {
    std::vector<int> members;
    PrefixPlan actions;
    double cost = 0.0;   // subflock cost after the proposed plan
    int horizon = 0;
    int particles = 0;
};

struct StepRow {
    int step = 0;
    double lookahead_cost = 0.0; // J(s-bang) reached by the agreed plan
    double level = 0.0;          // ell in force after this step
    double delta = 0.0;
    int k = 0;
    int rounds = 0;
    bool committed = false;
};

struct LevelLedger {
    std::vector<StepRow> rows;
    std::vector<double> levels;     // ell_0, then each committed level
    std::vector<double> thresholds; // Delta at each commit
    std::vector<int> k_at_commit;
};

struct DampcResult {
    PlanTrace trace;
    LevelLedger ledger;
    double avg_neighborhood = 0.0; // mean k in force per executed step
    double avg_horizon = 0.0;      // mean winner horizon per executed step
};

// k nearest birds to bird i (Euclidean, including i itself; ties broken by
// lower id), over non-removed birds only.
std::vector<int> neighbors(const FlockState& s, int i, int k);

// Next neighborhood size: shrink toward k_min after a committed level,
// grow by one otherwise.
int neigh_size(double lookahead_cost, int k, bool committed, int k_min, int k_max);

// Adaptive-horizon local planner for one neighborhood: escalates h = 1..h_max
// with swarm p = 2*beta*h*b until the subflock cost drops by at least delta
// below the cost of the already-fixed plans, returning the best rung found.
// Fixed prefixes (by bird id) are constants; only entries beyond them are
// optimized. Rung h draws its randomness from seed_for(seed, h).
NeighborhoodSolution local_ampc(const FlockState& s, std::span<const int> members,
                                const PrefixPlan& fixed, double delta, int h_max,
                                int beta, const PsoConfig& pso,
                                const FlockParams& params, std::uint64_t seed);

struct ConsensusOutcome {
    PrefixPlan actions;    // every live bird's agreed sequence
    FlockState next;       // state after executing the first agreed actions
    FlockState lookahead;  // s-bang: every bird rolled to the end of its plan
    std::vector<NeighborhoodSolution> round_winners;
    int rounds = 0;
    double mean_horizon = 0.0; // mean winner horizon over rounds
    int max_particles = 0;
};

// One synchronous consensus: repeatedly let every still-unfixed bird optimize
// its neighborhood (deduplicating identical member sets, which share the rng
// stream seed_for(seed, round, member_hash)), pick the cheapest solution, and
// fix its unfixed members' plans, until every bird is fixed.
ConsensusOutcome consensus_step(const FlockState& s, int k, const DampcConfig& cfg,
                                const FlockParams& params, std::uint64_t seed,
                                int steps_left);

// Full distributed run from an initial state.
DampcResult run(const FlockState& initial, const DampcConfig& cfg,
                const FlockParams& params, std::uint64_t seed);

// Centralized adaptive-horizon baseline: the same level logic driven by one
// whole-flock local_ampc per step, no consensus machinery. Shares the rng
// stream layout with run(), so run() with k_min = k_max = B must reproduce
// its committed actions bit for bit.
DampcResult ampc_run(const FlockState& initial, const DampcConfig& cfg,
                     const FlockParams& params, std::uint64_t seed);

} // namespace dampc
} // namespace vform
