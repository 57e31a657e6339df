#pragma once

#include "vform/flock.hpp"

namespace vform {

// V-formation built from the upwash geometry: equal velocities, each trailing
// bird offset from its leader by the upwash sweet spot (lateral component
// alternating between arms). Bird ids run from the left wing tip through the
// apex to the right wing tip.
FlockState analytic_v(int bird_count, const FlockParams& params,
                      Vec2 apex = {0.0, 0.0}, Vec2 velocity = {0.5, 0.5});

// Pinned V-formation states for the default parameters, polished by a long
// position-only swarm run on top of analytic_v. cost() <= 1e-3 for each.
FlockState v_fixture(int bird_count); // bird_count in {3, 5, 7}

} // namespace vform
