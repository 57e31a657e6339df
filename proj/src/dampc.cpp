#include "vform/dampc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vform/errors.hpp"
#include "vform/rng.hpp"

namespace vform {
namespace dampc {

namespace {

void validate(const DampcConfig& cfg) {
    if (!(cfg.threshold > 0.0)) throw ConfigError("dampc: threshold must be > 0");
    if (cfg.h_max < 1) throw ConfigError("dampc: h_max must be >= 1");
    if (cfg.max_steps < 1) throw ConfigError("dampc: max_steps must be >= 1");
    if (cfg.beta < 1) throw ConfigError("dampc: beta must be >= 1");
    if (cfg.k_min < 1 || cfg.k_max < cfg.k_min)
        throw ConfigError("dampc: need 1 <= k_min <= k_max");
}

std::vector<int> alive_ids(const FlockState& s) {
    std::vector<int> ids;
    for (int i = 0; i < s.size(); ++i)
        if (!s.removed[i]) ids.push_back(i);
    return ids;
}

PrefixPlan project(const PrefixPlan& fixed, std::span<const int> members) {
    PrefixPlan sub(members.size());
    for (std::size_t p = 0; p < members.size(); ++p)
        if (members[p] < static_cast<int>(fixed.size()))
            sub[p] = fixed[members[p]];
    return sub;
}

std::uint64_t hash_members(std::span<const int> members) {
    return member_hash(members.data(), static_cast<int>(members.size()));
}

} // namespace

std::vector<int> neighbors(const FlockState& s, int i, int k) {
    if (i < 0 || i >= s.size() || s.removed[i])
        throw ConfigError("neighbors: bird id invalid or removed");
    if (k < 1) throw ConfigError("neighbors: k must be >= 1");

    std::vector<std::pair<double, int>> order;
    for (int j = 0; j < s.size(); ++j) {
        if (s.removed[j]) continue;
        order.emplace_back(norm2(s.x[j] - s.x[i]), j);
    }
    std::sort(order.begin(), order.end());
    const int take = std::min<int>(k, static_cast<int>(order.size()));
    std::vector<int> ids(take);
    for (int p = 0; p < take; ++p) ids[p] = order[p].second;
    std::sort(ids.begin(), ids.end());
    return ids;
}

int neigh_size(double lookahead_cost, int k, bool committed, int k_min, int k_max) {
    if (!committed) return std::min(k + 1, k_max);
    const int dec = static_cast<int>(std::ceil(1.0 - lookahead_cost / k));
    return std::clamp(k - dec, k_min, k_max);
}

NeighborhoodSolution local_ampc(const FlockState& s, std::span<const int> members,
                                const PrefixPlan& fixed, double delta, int h_max,
                                int beta, const PsoConfig& pso,
                                const FlockParams& params, std::uint64_t seed) {
    if (members.empty()) throw ConfigError("local_ampc: empty neighborhood");
    const int b = static_cast<int>(members.size());

    const FlockState sub = extract(s, members);
    const PrefixPlan sub_fixed = project(fixed, members);
    const double reference = cost(rollout_union(sub, sub_fixed, params), params);

    struct Rung { int h; int p; double value; std::vector<double> point; };
    Rung best{0, 0, 0.0, {}};
    bool have_best = false;

    for (int h = 1; h <= h_max; ++h) {
        const int p = 2 * beta * h * b;
        const int dim = free_coords(sub, sub_fixed, h);
        double value;
        std::vector<double> point;
        if (dim == 0) {
            value = cost(rollout_boxed(sub, sub_fixed, h, {}, params), params);
        } else {
            PsoConfig pc = pso;
            pc.particle_count = p;
            pc.seed_center = true;
            const auto obj = [&](std::span<const double> z) {
                return cost(rollout_boxed(sub, sub_fixed, h, z, params), params);
            };
            PsoResult r = minimize(obj, -1.0, 1.0, dim, pc,
                                   seed_for(seed, static_cast<std::uint64_t>(h)));
            value = r.best_value;
            point = std::move(r.best_point);
        }
        if (!have_best || value < best.value) {
            best = {h, p, value, std::move(point)};
            have_best = true;
        }
        if (reference - value >= delta) break;
    }

    NeighborhoodSolution sol;
    sol.members.assign(members.begin(), members.end());
    sol.cost = best.value;
    sol.horizon = best.h;
    sol.particles = best.p;
    sol.actions.assign(s.size(), {});
    const PrefixPlan decoded =
        decode_boxed(sub, sub_fixed, best.h, best.point, params);
    for (int p = 0; p < b; ++p) sol.actions[members[p]] = decoded[p];
    return sol;
}

ConsensusOutcome consensus_step(const FlockState& s, int k, const DampcConfig& cfg,
                                const FlockParams& params, std::uint64_t seed,
                                int steps_left) {
    const std::vector<int> alive = alive_ids(s);
    if (alive.empty()) throw ConfigError("consensus_step: no birds left");
    const int denom = std::max(1, steps_left);

    ConsensusOutcome out;
    out.actions.assign(s.size(), {});
    std::vector<std::uint8_t> is_fixed(s.size(), 0);
    for (int i = 0; i < s.size(); ++i)
        if (s.removed[i]) is_fixed[i] = 1;

    int unfixed = static_cast<int>(alive.size());
    double horizon_sum = 0.0;

    while (unfixed > 0) {
        ++out.rounds;
        if (out.rounds > s.size())
            throw InternalError("consensus_step: rounds exceeded flock size");

        // One local solve per distinct neighborhood this round.
        std::map<std::vector<int>, NeighborhoodSolution> solved;
        std::vector<std::pair<int, const NeighborhoodSolution*>> owners;
        for (int i : alive) {
            if (is_fixed[i]) continue;
            std::vector<int> n = neighbors(s, i, k);
            auto it = solved.find(n);
            if (it == solved.end()) {
                const FlockState sub = extract(s, n);
                const double ref =
                    cost(rollout_union(sub, project(out.actions, n), params), params);
                const double delta_i = ref / denom;
                NeighborhoodSolution sol = local_ampc(
                    s, n, out.actions, delta_i, cfg.h_max, cfg.beta, cfg.pso, params,
                    seed_for(seed, static_cast<std::uint64_t>(out.rounds),
                             hash_members(n)));
                it = solved.emplace(std::move(n), std::move(sol)).first;
            }
            owners.emplace_back(i, &it->second);
        }

        const NeighborhoodSolution* winner = nullptr;
        for (const auto& [i, sol] : owners)
            if (!winner || sol->cost < winner->cost) winner = sol;

        for (int j : winner->members) {
            if (is_fixed[j]) continue;
            out.actions[j] = winner->actions[j];
            is_fixed[j] = 1;
            --unfixed;
        }
        out.round_winners.push_back(*winner);
        horizon_sum += winner->horizon;
        out.max_particles = std::max(out.max_particles, winner->particles);
    }

    out.mean_horizon = horizon_sum / out.rounds;

    std::vector<Vec2> first(s.size());
    for (int i : alive)
        if (!out.actions[i].empty()) first[i] = out.actions[i][0];
    out.next = step(s, first, params);
    out.lookahead = rollout_union(s, out.actions, params);
    return out;
}

namespace {

struct LevelLoop {
    // Shared outer loop of run() and ampc_run(): per-step planning is the
    // only part that differs.
    template <typename Plan>
    static DampcResult drive(const FlockState& initial, const DampcConfig& cfg,
                             const FlockParams& params, Plan&& plan_step,
                             bool adapt_k) {
        validate(cfg);
        const int B = initial.size();
        const int k_max = std::min(cfg.k_max, B);
        const int k_min = std::min(cfg.k_min, k_max);
        int k = k_max;

        DampcResult res;
        res.trace.initial = initial;
        double ell = cost(initial, params);
        res.trace.committed_levels.push_back(ell);
        res.ledger.levels.push_back(ell);
        if (ell <= cfg.threshold) {
            res.trace.final_cost = ell;
            res.trace.converged = true;
            res.avg_neighborhood = k_max;
            return res;
        }

        FlockState s = initial;
        double k_sum = 0.0, h_sum = 0.0;
        int steps = 0;

        for (int t = 1; ell > cfg.threshold && t < cfg.max_steps; ++t) {
            const int steps_left = cfg.max_steps - t;
            ConsensusOutcome out = plan_step(s, k, t, steps_left);
            const double look = cost(out.lookahead, params);
            const double delta = ell / steps_left;
            const bool committed = ell - look > delta;

            s = out.next;
            ++steps;
            k_sum += k;
            h_sum += out.mean_horizon;

            TraceStep ts;
            ts.accel.assign(B, Vec2{});
            for (int i = 0; i < B; ++i)
                if (!out.actions[i].empty()) ts.accel[i] = out.actions[i][0];
            ts.dist = Disturbance::none(B);
            ts.state_after = s;
            ts.level = committed ? look : ell;
            ts.delta = delta;
            ts.horizon = static_cast<int>(std::lround(out.mean_horizon));
            ts.particles = out.max_particles;
            res.trace.steps.push_back(std::move(ts));

            res.ledger.rows.push_back(
                {t, look, committed ? look : ell, delta, k, out.rounds, committed});

            if (committed) {
                ell = look;
                res.ledger.levels.push_back(ell);
                res.ledger.thresholds.push_back(delta);
                res.ledger.k_at_commit.push_back(k);
                res.trace.committed_levels.push_back(ell);
            }
            if (adapt_k) k = neigh_size(look, k, committed, k_min, k_max);
        }

        res.trace.converged = ell <= cfg.threshold;
        res.trace.final_cost = res.trace.steps.empty()
                                   ? ell
                                   : cost(res.trace.steps.back().state_after, params);
        res.avg_neighborhood = steps ? k_sum / steps : static_cast<double>(k_max);
        res.avg_horizon = steps ? h_sum / steps : 0.0;
        return res;
    }
};

} // namespace

DampcResult run(const FlockState& initial, const DampcConfig& cfg,
                const FlockParams& params, std::uint64_t seed) {
    return LevelLoop::drive(
        initial, cfg, params,
        [&](const FlockState& s, int k, int t, int steps_left) {
            return consensus_step(s, k, cfg, params,
                                  seed_for(seed, kStreamPlanner,
                                           static_cast<std::uint64_t>(t)),
                                  steps_left);
        },
        /*adapt_k=*/true);
}

DampcResult ampc_run(const FlockState& initial, const DampcConfig& cfg,
                     const FlockParams& params, std::uint64_t seed) {
    return LevelLoop::drive(
        initial, cfg, params,
        [&](const FlockState& s, int /*k*/, int t, int steps_left) {
            const std::vector<int> all = alive_ids(s);
            const std::uint64_t base =
                seed_for(seed, kStreamPlanner, static_cast<std::uint64_t>(t));
            const double delta_i = cost(s, params) / std::max(1, steps_left);
            NeighborhoodSolution sol =
                local_ampc(s, all, PrefixPlan(s.size()), delta_i, cfg.h_max,
                           cfg.beta, cfg.pso, params,
                           seed_for(base, 1, hash_members(all)));

            ConsensusOutcome out;
            out.actions = sol.actions;
            out.rounds = 1;
            out.mean_horizon = sol.horizon;
            out.max_particles = sol.particles;
            out.round_winners.push_back(std::move(sol));
            std::vector<Vec2> first(s.size());
            for (int i : all)
                if (!out.actions[i].empty()) first[i] = out.actions[i][0];
            out.next = step(s, first, params);
            out.lookahead = rollout_union(s, out.actions, params);
            return out;
        },
        /*adapt_k=*/false);
}

} // namespace dampc
} // namespace vform
