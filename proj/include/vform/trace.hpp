#pragma once

#include <vector>

#include "vform/flock.hpp"

namespace vform {

// One executed micro-step. Replaying accel+dist from `initial` must
// reproduce every state_after exactly (up to serialization rounding).
struct TraceStep {
    std::vector<Vec2> accel;
    Disturbance dist;
    FlockState state_after;
    double level = 0.0;    // cost bound in force after this step
    double delta = 0.0;    // commit threshold that was in force
    int horizon = 0;       // lookahead depth of the block this step came from
    int particles = 0;     // swarm size used for that block
};

struct PlanTrace {
    FlockState initial;
    std::vector<TraceStep> steps;
    double final_cost = 0.0;
    bool converged = false;
    std::vector<double> committed_levels; // ell_0, ell_1, ... (ell_0 = initial cost)
};

} // namespace vform
