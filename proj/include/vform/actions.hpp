#pragma once

#include <span>
#include <vector>

#include "vform/flock.hpp"

namespace vform {

// Maps a PSO box point u in [-1,1]^2 to a feasible acceleration for a bird
// with current velocity v: radial square->disk map onto the disk of radius
// rho*||v|| (corners of the box reach the full radius), then scaled down if
// needed so the resulting speed stays <= v_max.
Vec2 decode_accel(Vec2 u, Vec2 v, const FlockParams& params);

// Per-bird committed acceleration sequences; entry i may be empty (nothing
// fixed for bird i yet). Values are raw accelerations, not box points.
using PrefixPlan = std::vector<std::vector<Vec2>>;

// Number of box coordinates needed to roll `s` forward h steps when each
// bird's first fixed_len steps are pinned: 2 * sum over alive birds of
// max(0, h - len(fixed[i])).
int free_coords(const FlockState& s, const PrefixPlan& fixed, int h);

// Rolls s forward h steps. At step t, bird i takes fixed[i][t] if t is inside
// its fixed prefix, otherwise the next pair from z decoded via decode_accel
// against the bird's current velocity. z is consumed step-major, bird-minor.
// Also used with an empty prefix plan as the generic h-step decoder.
FlockState rollout_boxed(const FlockState& s, const PrefixPlan& fixed, int h,
                         std::span<const double> z, const FlockParams& params);

// Same decoding, but returns the full per-step acceleration sequences
// (length h for every alive bird) instead of just the final state.
PrefixPlan decode_boxed(const FlockState& s, const PrefixPlan& fixed, int h,
                        std::span<const double> z, const FlockParams& params);

// Rolls every bird to the end of its own fixed sequence (birds with shorter
// sequences stop early and hold position). This is the asynchronous union
// state reached once all committed prefixes have been executed.
FlockState rollout_union(const FlockState& s, const PrefixPlan& fixed,
                         const FlockParams& params);

// Copies the listed birds (ids ascending) into a dense sub-state.
FlockState extract(const FlockState& s, std::span<const int> members);

} // namespace vform
