#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace vform {

// Global-best particle swarm with random neighborhoods, box clamping and
// stall-based termination. All stochastic choices come from the seed passed
// to minimize(); two calls with equal arguments produce identical results.
struct PsoConfig {
    int particle_count = 20;
    double inertia = 0.729;
    double self_adjust = 1.49;
    double social_adjust = 1.49;
    int max_iterations = 100;
    double neighborhood_fraction = 0.25; // neighborhood size = max(2, ceil(frac * p))
    double stall_tolerance = 1e-9;       // improvement <= this counts as a stall
    int stall_iterations = 25;           // consecutive stalls before stopping
    bool seed_center = false;            // particle 0 starts at the box center
};

struct PsoResult {
    std::vector<double> best_point;
    double best_value = 0.0;
    int iterations = 0;   // update sweeps performed (excludes the init sweep)
    int evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

// Post-iteration snapshot for tests: personal bests never worsen, global best
// is monotone.
struct PsoIterationView {
    int iteration;
    double best_value;
    std::span<const double> personal_best;
};
using PsoObserver = std::function<void(const PsoIterationView&)>;

PsoResult minimize(const Objective& f, std::span<const double> lo,
                   std::span<const double> hi, const PsoConfig& cfg,
                   std::uint64_t seed, const PsoObserver& observer = nullptr);

// Uniform box [lo, hi]^dim.
PsoResult minimize(const Objective& f, double lo, double hi, int dim,
                   const PsoConfig& cfg, std::uint64_t seed,
                   const PsoObserver& observer = nullptr);

} // namespace vform
