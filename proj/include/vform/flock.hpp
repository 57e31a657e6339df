#pragma once

#include <cstdint>
#include <vector>

#include "vform/vec2.hpp"

namespace vform {

// Model constants. Defaults follow the evaluation setup; Sigma1 is the
// covariance of the upwash Gaussian in (lateral, longitudinal) offsets.
struct FlockParams {
    double wing_span = 1.0;              // w
    double view_angle = 0.52359877559829887; // theta, full cone angle (pi/6)
    double v_max = 2.0;                  // speed cap
    double accel_ratio = 0.9;            // rho, ||a|| <= rho * ||v||
    double upwash_alpha = 1.0;           // alpha, smearing factor
    Vec2 upwash_mean{0.94634954084936207, 1.0}; // mu1 = ((12+pi)/16 * w, 1)
    double sigma_xx = 1.0, sigma_xy = 0.0, sigma_yy = 1.0; // Sigma1
    double min_pair_distance = 0.3;      // d_min for initial sampling
};

// Positions and velocities for B birds. removed[i] marks a bird taken out by
// an attack: it is carried unchanged by step() and ignored by every metric.
struct FlockState {
    std::vector<Vec2> x;
    std::vector<Vec2> v;
    std::vector<std::uint8_t> removed;

    int size() const { return static_cast<int>(x.size()); }
    int alive_count() const;
    bool operator==(const FlockState&) const = default;
};

FlockState make_state(int bird_count);

// One step of exogenous input: additive position displacement per bird plus
// a removal mask (birds to take out at this step, permanently).
struct Disturbance {
    std::vector<Vec2> displacement;
    std::vector<std::uint8_t> remove;

    static Disturbance none(int bird_count);
};

// Accelerations for a horizon of steps: steps[t][i] is bird i's acceleration
// at offset t. Entries for removed birds are ignored.
struct ActionPlan {
    std::vector<std::vector<Vec2>> steps;

    int horizon() const { return static_cast<int>(steps.size()); }
};

// x' = x + v + d, v' = v + a, per bird; removed birds carry over unchanged.
FlockState step(const FlockState& s, const std::vector<Vec2>& accel,
                const Disturbance& dist, const FlockParams& params);
FlockState step(const FlockState& s, const std::vector<Vec2>& accel,
                const FlockParams& params);

// Clear view: sum over birds of the fraction of the view cone (full angle
// theta about the velocity direction) blocked by other birds' wing segments,
// computed by exact angular-interval merging. 0 is best.
double clear_view(const FlockState& s, const FlockParams& params);

// Velocity matching: sum over pairs of (||vi - vj|| / (||vi|| + ||vj||))^2.
// 0 is best.
double velocity_matching(const FlockState& s, const FlockParams& params);

// Upwash benefit: sum over birds of 1 - um_i where um_i is bird i's accrued
// upwash from birds ahead of it, clamped to [0, 1]. 0 is best (every bird
// fully in upwash); an isolated bird contributes 1.
double upwash_benefit(const FlockState& s, const FlockParams& params);

// J(s) = CV(s)^2 + VM(s)^2 + (UB(s) - 1)^2. A state is a V-formation at
// threshold phi iff J(s) <= phi.
double cost(const FlockState& s, const FlockParams& params);

// Applies the plan with zero disturbance and returns cost of the final state.
double rollout_cost(const FlockState& s, const ActionPlan& plan,
                    const FlockParams& params);

struct InitBounds {
    Vec2 pos_lo{0.0, 0.0};
    Vec2 pos_hi{3.0, 3.0};
    Vec2 vel_lo{0.25, 0.25};
    Vec2 vel_hi{0.75, 0.75};
};

// Uniform positions/velocities inside the bounds, rejection-sampled until all
// pairwise distances are >= params.min_pair_distance. Throws SamplingError
// after 10^4 failed attempts.
FlockState sample_initial(int bird_count, const InitBounds& bounds,
                          const FlockParams& params, std::uint64_t seed);

} // namespace vform
