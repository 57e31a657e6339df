#pragma once

#include <cstdint>
#include <vector>

#include "vform/flock.hpp"
#include "vform/pso.hpp"
#include "vform/trace.hpp"

namespace vform {
namespace ares {

// Adaptive receding-horizon synthesis: n clones descend a cost ladder; each
// level must beat the previous one by the clone's threshold Delta, horizons
// and swarm sizes escalate when a level stalls, and clones are resampled
// toward the better half after every committed level.
struct AresConfig {
    double threshold = 1e-3; // phi: J <= phi means V-formation reached
    int clone_count = 20;    // n
    int max_levels = 20;     // m: level budget and plan-length bound
    int h_max = 5;
    int p_start = 10;
    int p_inc = 5;
    int p_max = 40;
};

struct HistoryBlock {
    ActionPlan plan;   // h-step block committed at one level
    FlockState state;  // state after executing the block
    double cost;       // J(state)
};

struct Clone {
    FlockState state;   // state at the last committed level
    double last_cost;   // J(state)
    double delta = 0.0; // commit threshold Delta_k
    std::vector<HistoryBlock> history;

    // Filled by simulate() for the level being attempted.
    ActionPlan pending_plan;
    FlockState pending_state;
    double pending_cost = 0.0;
};

// Next commit threshold after achieving cost J while i levels remain of m:
// Delta = J / (m - i), denominator clamped to >= 1.
double next_threshold(double achieved_cost, int max_levels, int level_index);

// Runs one PSO per clone at horizon h from the clone's current state and
// fills pending_{plan,state,cost}; updates the clone's Delta when the
// achieved improvement exceeds it. Clone k uses rng stream seed_for(seed, k+1).
// pso.particle_count is taken as given here; the ladder in synthesize()
// chooses it.
void simulate(std::vector<Clone>& clones, int h, int level_index, int max_levels,
              const PsoConfig& pso, const FlockParams& params, std::uint64_t seed);

// Keeps clones strictly below the median cost; every other clone becomes a
// uniformly drawn copy (state, cost, Delta, history) of a kept one. All-equal
// populations are left untouched.
void resample(std::vector<Clone>& clones, std::uint64_t seed);

// Full synthesis loop from an initial state. The returned trace unrolls each
// committed block into single steps; trace.converged reports whether the last
// committed level is <= phi.
PlanTrace synthesize(const FlockState& initial, const AresConfig& cfg,
                     const PsoConfig& pso, const FlockParams& params,
                     std::uint64_t seed);

} // namespace ares
} // namespace vform
