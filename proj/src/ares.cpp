#include "vform/ares.hpp"

#include <algorithm>
#include <limits>

#include "vform/actions.hpp"
#include "vform/errors.hpp"
#include "vform/rng.hpp"

namespace vform {
namespace ares {

namespace {

void validate(const AresConfig& cfg) {
    if (!(cfg.threshold > 0.0)) throw ConfigError("ares: threshold must be > 0");
    if (cfg.clone_count < 1) throw ConfigError("ares: clone_count must be >= 1");
    if (cfg.max_levels < 1) throw ConfigError("ares: max_levels must be >= 1");
    if (cfg.h_max < 1) throw ConfigError("ares: h_max must be >= 1");
    if (cfg.p_start < 1 || cfg.p_inc < 1 || cfg.p_max < cfg.p_start)
        throw ConfigError("ares: particle ladder must satisfy 1 <= p_start <= p_max, p_inc >= 1");
}

double median_cost(std::vector<double> costs) {
    std::sort(costs.begin(), costs.end());
    const std::size_t n = costs.size();
    return (n % 2 == 1) ? costs[n / 2]
                        : 0.5 * (costs[n / 2 - 1] + costs[n / 2]);
}

} // namespace

double next_threshold(double achieved_cost, int max_levels, int level_index) {
    return achieved_cost / std::max(1, max_levels - level_index);
}

void simulate(std::vector<Clone>& clones, int h, int level_index, int max_levels,
              const PsoConfig& pso, const FlockParams& params, std::uint64_t seed) {
    if (h < 1) throw ConfigError("ares: horizon must be >= 1");
    const PrefixPlan no_prefix;
    for (std::size_t k = 0; k < clones.size(); ++k) {
        Clone& c = clones[k];
        const int dim = free_coords(c.state, no_prefix, h);
        const auto obj = [&](std::span<const double> z) {
            return cost(rollout_boxed(c.state, no_prefix, h, z, params), params);
        };
        const PsoResult r =
            minimize(obj, -1.0, 1.0, dim, pso, seed_for(seed, k + 1));
        c.pending_plan.steps.clear();
        PrefixPlan decoded = decode_boxed(c.state, no_prefix, h, r.best_point, params);
        c.pending_plan.steps.assign(h, std::vector<Vec2>(c.state.size()));
        for (int i = 0; i < c.state.size(); ++i)
            for (int t = 0; t < h && t < static_cast<int>(decoded[i].size()); ++t)
                c.pending_plan.steps[t][i] = decoded[i][t];
        c.pending_state = rollout_boxed(c.state, no_prefix, h, r.best_point, params);
        c.pending_cost = r.best_value;
        if (c.last_cost - c.pending_cost > c.delta)
            c.delta = next_threshold(c.pending_cost, max_levels, level_index);
    }
}

void resample(std::vector<Clone>& clones, std::uint64_t seed) {
    std::vector<double> costs(clones.size());
    for (std::size_t k = 0; k < clones.size(); ++k) costs[k] = clones[k].last_cost;
    const double med = median_cost(costs);

    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < clones.size(); ++k)
        if (costs[k] < med) keep.push_back(k);
    if (keep.empty()) return; // all at the median: nothing strictly better

    Rng rng(seed);
    for (std::size_t k = 0; k < clones.size(); ++k) {
        if (costs[k] < med) continue;
        clones[k] = clones[keep[rng.below(keep.size())]];
    }
}

PlanTrace synthesize(const FlockState& initial, const AresConfig& cfg,
                     const PsoConfig& pso, const FlockParams& params,
                     std::uint64_t seed) {
    validate(cfg);
    PlanTrace trace;
    trace.initial = initial;

    const double j0 = cost(initial, params);
    trace.committed_levels.push_back(j0);
    if (j0 <= cfg.threshold) {
        trace.final_cost = j0;
        trace.converged = true;
        return trace;
    }

    std::vector<Clone> clones(cfg.clone_count);
    for (Clone& c : clones) {
        c.state = initial;
        c.last_cost = j0;
    }

    struct LevelMeta { int h; int p; double delta; double level; };
    std::vector<LevelMeta> meta;

    double ell = j0;
    int level = 1, h = 1, p = cfg.p_start, attempt = 0;
    std::vector<double> deltas_before(clones.size());

    while (true) {
        ++attempt;
        PsoConfig pc = pso;
        pc.particle_count = p;
        pc.seed_center = true;
        for (std::size_t k = 0; k < clones.size(); ++k)
            deltas_before[k] = clones[k].delta;

        simulate(clones, h, level, cfg.max_levels, pc, params,
                 seed_for(seed, static_cast<std::uint64_t>(level),
                          static_cast<std::uint64_t>(attempt)));

        std::size_t best = 0;
        for (std::size_t k = 1; k < clones.size(); ++k)
            if (clones[k].pending_cost < clones[best].pending_cost) best = k;

        if (ell - clones[best].pending_cost > deltas_before[best]) {
            for (Clone& c : clones) {
                c.state = c.pending_state;
                c.last_cost = c.pending_cost;
                c.history.push_back({c.pending_plan, c.state, c.last_cost});
            }
            ell = clones[best].pending_cost;
            meta.push_back({h, p, deltas_before[best], ell});
            trace.committed_levels.push_back(ell);
            resample(clones, seed_for(seed, static_cast<std::uint64_t>(level), 0));
            ++level;
            h = 1;
            p = cfg.p_start;
            attempt = 0;
            if (ell <= cfg.threshold || level > cfg.max_levels) break;
        } else {
            if (h < cfg.h_max) {
                ++h;
            } else if (p < cfg.p_max) {
                h = 1;
                p = std::min(p + cfg.p_inc, cfg.p_max);
            } else {
                break; // ladder exhausted without beating Delta
            }
        }
    }

    std::size_t winner = 0;
    for (std::size_t k = 1; k < clones.size(); ++k)
        if (clones[k].last_cost < clones[winner].last_cost) winner = k;
    const auto& history = clones[winner].history;
    if (history.size() != meta.size())
        throw InternalError("ares: history/level bookkeeping out of sync");

    FlockState cur = initial;
    for (std::size_t li = 0; li < history.size(); ++li) {
        const ActionPlan& plan = history[li].plan;
        for (const auto& accel : plan.steps) {
            cur = step(cur, accel, params);
            TraceStep ts;
            ts.accel = accel;
            ts.dist = Disturbance::none(cur.size());
            ts.state_after = cur;
            ts.level = meta[li].level;
            ts.delta = meta[li].delta;
            ts.horizon = meta[li].h;
            ts.particles = meta[li].p;
            trace.steps.push_back(std::move(ts));
        }
    }
    trace.final_cost = trace.steps.empty() ? j0 : cost(cur, params);
    trace.converged = ell <= cfg.threshold;
    return trace;
}

} // namespace ares
} // namespace vform
