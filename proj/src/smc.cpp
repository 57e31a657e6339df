#include "vform/smc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "vform/errors.hpp"
#include "vform/rng.hpp"

namespace vform {
namespace smc {

double chernoff_bound(double epsilon, double delta) {
    if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0))
        throw ConfigError("smc: need epsilon > 0 and delta in (0, 1)");
    return 4.0 * std::log(2.0 / delta) / (epsilon * epsilon);
}

int required_samples(double epsilon, double delta) {
    return static_cast<int>(std::ceil(chernoff_bound(epsilon, delta)));
}

std::uint64_t run_seed(std::uint64_t master, int index) {
    return seed_for(master, kStreamRun, static_cast<std::uint64_t>(index));
}

RunStats estimate(const Experiment& experiment, int count,
                  std::uint64_t master, int workers) {
    if (count < 1) throw ConfigError("smc: sample count must be >= 1");
    if (!experiment) throw ConfigError("smc: experiment must be callable");
    workers = std::clamp(workers, 1, count);

    RunStats stats;
    stats.total = count;
    stats.records.resize(count);

    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            const std::uint64_t seed = run_seed(master, i);
            try {
                stats.records[i] = experiment(seed);
            } catch (const std::exception& e) {
                throw BatchError(e.what(), seed);
            }
        }
    } else {
        std::atomic<int> next{0};
        std::mutex err_mu;
        std::exception_ptr first_error;
        std::uint64_t failing_seed = 0;

        auto worker = [&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                const std::uint64_t seed = run_seed(master, i);
                try {
                    stats.records[i] = experiment(seed);
                } catch (...) {
                    std::lock_guard lock(err_mu);
                    if (!first_error) {
                        first_error = std::current_exception();
                        failing_seed = seed;
                    }
                    next.store(count);
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (first_error) {
            try {
                std::rethrow_exception(first_error);
            } catch (const std::exception& e) {
                throw BatchError(e.what(), failing_seed);
            }
        }
    }

    double dur = 0.0, hor = 0.0, nbr = 0.0;
    for (const RunRecord& r : stats.records) {
        if (!r.success) continue;
        ++stats.successes;
        dur += r.duration;
        hor += r.avg_horizon;
        nbr += r.avg_neighborhood;
    }
    stats.success_rate = static_cast<double>(stats.successes) / count;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    stats.mean_duration = stats.successes ? dur / stats.successes : nan;
    stats.mean_horizon = stats.successes ? hor / stats.successes : nan;
    stats.mean_neighborhood = stats.successes ? nbr / stats.successes : nan;
    return stats;
}

} // namespace smc
} // namespace vform
