#pragma once

#include <cstdint>
#include <vector>

#include "vform/flock.hpp"
#include "vform/pso.hpp"
#include "vform/trace.hpp"

namespace vform {
namespace games {

// Controller-attacker games on a flock that starts in V-formation. Both
// sides act simultaneously each step: the controller picks accelerations via
// the adaptive-horizon planner, the attacker picks a disturbance.
enum class AttackKind {
    None,                 // no disturbance; baseline sanity case
    Removal,              // take R birds out permanently at the first step
    RandomDisplacement,   // fresh random subset displaced each step, T steps
    AdaptiveDisplacement, // subset and displacements chosen by PSO, T steps
};

struct GameConfig {
    AttackKind attack = AttackKind::Removal;
    int attacked_count = 1;       // R
    std::vector<int> removal_set; // explicit 0-based ids; empty = sample R uniformly
    double magnitude = 0.5;       // M: displacement length cap
    int attack_rounds = 20;       // T: window for displacement attacks
    double threshold = 1e-3;      // phi
    int max_steps = 40;           // m: total game length bound
    int h_max = 5;                // controller horizon cap
    int att_h_max = 2;            // attacker horizon cap
    int beta_ctrl = 10;           // controller swarm scale (p = 2*beta*h*B)
    int beta_att = 10;            // attacker swarm scale
    PsoConfig pso;
};

struct GameOutcome {
    bool controller_won = false;
    // Steps needed to reach J <= phi: counted from the end of the attack
    // window for displacement attacks, from the start for removal.
    int duration = 0;
    double avg_horizon = 0.0;
    PlanTrace trace;
};

// The disturbance each attacker emits at step t (1-based). Removal fires only
// at t = 1; displacement attacks are zero after cfg.attack_rounds.
Disturbance attack_brg(const FlockState& s, const GameConfig& cfg,
                       std::uint64_t seed, int t);
Disturbance attack_rdg(const FlockState& s, const GameConfig& cfg,
                       std::uint64_t seed, int t);
// Adaptive attacker: maximizes the controller's cost over its own lookahead
// (assuming zero controller acceleration), encoding the attacked subset as
// per-bird scores with top-R selection plus per-bird polar displacements.
Disturbance attack_ampc(const FlockState& s, const GameConfig& cfg,
                        const FlockParams& params, std::uint64_t seed, int t,
                        int steps_left);

GameOutcome play(const FlockState& initial, const GameConfig& cfg,
                 const FlockParams& params, std::uint64_t seed);

} // namespace games
} // namespace vform
