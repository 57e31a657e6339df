#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace vform {
namespace smc {

// Statistical model checking of success probability by Monte Carlo batches
// sized with the additive Chernoff-Hoeffding bound: with N >= 4 ln(2/delta) /
// epsilon^2 runs, P(|estimate - p| > epsilon) <= delta.

// The raw bound before rounding. Exposed so the exact epsilon-halving
// quadrupling relation can be asserted without ceil interference.
double chernoff_bound(double epsilon, double delta);

int required_samples(double epsilon, double delta);

// Seed for run `index` of a batch; every run derives all of its randomness
// from this value, so batches are reproducible run by run regardless of the
// worker count or completion order.
std::uint64_t run_seed(std::uint64_t master, int index);

struct RunRecord {
    std::uint64_t seed = 0;
    bool success = false;
    double duration = 0.0;
    double avg_horizon = 0.0;
    double avg_neighborhood = 0.0;
    double final_cost = 0.0;

    bool operator==(const RunRecord&) const = default;
};

struct RunStats {
    int total = 0;
    int successes = 0;
    double success_rate = 0.0;
    // Means over successful runs only; NaN when there are none.
    double mean_duration = 0.0;
    double mean_horizon = 0.0;
    double mean_neighborhood = 0.0;
    std::vector<RunRecord> records; // index order, independent of workers
};

using Experiment = std::function<RunRecord(std::uint64_t run_seed)>;

// Runs `count` independent runs of the experiment across `workers` threads.
// Worker failures surface as BatchError carrying the failing run's seed.
RunStats estimate(const Experiment& experiment, int count,
                  std::uint64_t master, int workers);

} // namespace smc
} // namespace vform
