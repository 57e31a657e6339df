#include "vform/games.hpp"

#include <algorithm>
#include <cmath>

#include "vform/actions.hpp"
#include "vform/dampc.hpp"
#include "vform/errors.hpp"
#include "vform/rng.hpp"

namespace vform {
namespace games {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

void validate(const GameConfig& cfg, int bird_count) {
    if (!(cfg.threshold > 0.0)) throw ConfigError("game: threshold must be > 0");
    if (cfg.max_steps < 1) throw ConfigError("game: max_steps must be >= 1");
    if (cfg.h_max < 1 || cfg.att_h_max < 1)
        throw ConfigError("game: horizon caps must be >= 1");
    if (cfg.beta_ctrl < 1 || cfg.beta_att < 1)
        throw ConfigError("game: swarm scales must be >= 1");
    if (cfg.attack == AttackKind::Removal) {
        const int r = cfg.removal_set.empty()
                          ? cfg.attacked_count
                          : static_cast<int>(cfg.removal_set.size());
        if (r < 0 || r >= bird_count)
            throw ConfigError("game: must remove fewer birds than the flock has");
        std::vector<int> ids = cfg.removal_set;
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw ConfigError("game: removal set has duplicate ids");
        for (int id : ids)
            if (id < 0 || id >= bird_count)
                throw ConfigError("game: removal id out of range");
    } else if (cfg.attack != AttackKind::None) {
        if (cfg.attacked_count < 0 || cfg.attacked_count > bird_count)
            throw ConfigError("game: attacked_count out of range");
        if (!(cfg.magnitude >= 0.0)) throw ConfigError("game: magnitude must be >= 0");
        if (cfg.attack_rounds < 0) throw ConfigError("game: attack_rounds must be >= 0");
    }
}

std::vector<int> alive_ids(const FlockState& s) {
    std::vector<int> ids;
    for (int i = 0; i < s.size(); ++i)
        if (!s.removed[i]) ids.push_back(i);
    return ids;
}

// First `take` elements of a partial Fisher-Yates shuffle of `pool`.
std::vector<int> sample_subset(std::vector<int> pool, int take, Rng& rng) {
    take = std::min<int>(take, static_cast<int>(pool.size()));
    for (int i = 0; i < take; ++i) {
        const int j = i + static_cast<int>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(take);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace

Disturbance attack_brg(const FlockState& s, const GameConfig& cfg,
                       std::uint64_t seed, int t) {
    Disturbance d = Disturbance::none(s.size());
    if (t != 1) return d;
    std::vector<int> chosen = cfg.removal_set;
    if (chosen.empty() && cfg.attacked_count > 0) {
        Rng rng(seed_for(seed, kStreamRemoval));
        chosen = sample_subset(alive_ids(s), cfg.attacked_count, rng);
    }
    for (int id : chosen) d.remove[id] = 1;
    return d;
}

Disturbance attack_rdg(const FlockState& s, const GameConfig& cfg,
                       std::uint64_t seed, int t) {
    Disturbance d = Disturbance::none(s.size());
    if (t > cfg.attack_rounds || cfg.attacked_count == 0) return d;
    Rng rng(seed_for(seed, kStreamAttacker, static_cast<std::uint64_t>(t)));
    const std::vector<int> chosen =
        sample_subset(alive_ids(s), cfg.attacked_count, rng);
    for (int id : chosen) {
        const double mag = rng.uniform(0.0, cfg.magnitude);
        const double ang = rng.uniform(0.0, kTau);
        d.displacement[id] = {mag * std::cos(ang), mag * std::sin(ang)};
    }
    return d;
}

namespace {

// Box layout per lookahead step: one score per live bird (top-R attacked),
// then (magnitude, angle) per live bird. Only attacked birds' displacements
// take effect.
Disturbance decode_attack_step(const FlockState& s, std::span<const int> alive,
                               int r, std::span<const double> z) {
    const int a = static_cast<int>(alive.size());
    thread_local std::vector<std::pair<double, int>> ranked;
    ranked.clear();
    for (int p = 0; p < a; ++p) ranked.emplace_back(-z[p], alive[p]);
    std::sort(ranked.begin(), ranked.end());

    Disturbance d = Disturbance::none(s.size());
    for (int q = 0; q < std::min(r, a); ++q) {
        const int id = ranked[q].second;
        int p = 0;
        while (alive[p] != id) ++p;
        const double mag = z[a + 2 * p];
        const double ang = z[a + 2 * p + 1];
        d.displacement[id] = {mag * std::cos(ang), mag * std::sin(ang)};
    }
    return d;
}

} // namespace

Disturbance attack_ampc(const FlockState& s, const GameConfig& cfg,
                        const FlockParams& params, std::uint64_t seed, int t,
                        int steps_left) {
    if (t > cfg.attack_rounds || cfg.attacked_count == 0 || cfg.magnitude == 0.0)
        return Disturbance::none(s.size());

    const std::vector<int> alive = alive_ids(s);
    const int a = static_cast<int>(alive.size());
    const int per_step = 3 * a;
    const double j_now = cost(s, params);
    const double delta = j_now / std::max(1, steps_left);
    const std::uint64_t base =
        seed_for(seed, kStreamAttacker, static_cast<std::uint64_t>(t));

    struct Rung { double value = 0.0; std::vector<double> point; };
    Rung best;
    bool have_best = false;

    for (int h = 1; h <= cfg.att_h_max; ++h) {
        std::vector<double> lo(static_cast<std::size_t>(per_step) * h);
        std::vector<double> hi(static_cast<std::size_t>(per_step) * h);
        for (int st = 0; st < h; ++st) {
            double* l = lo.data() + static_cast<std::size_t>(st) * per_step;
            double* u = hi.data() + static_cast<std::size_t>(st) * per_step;
            for (int p = 0; p < a; ++p) { l[p] = -1.0; u[p] = 1.0; }
            for (int p = 0; p < a; ++p) {
                l[a + 2 * p] = 0.0;
                u[a + 2 * p] = cfg.magnitude;
                l[a + 2 * p + 1] = 0.0;
                u[a + 2 * p + 1] = kTau;
            }
        }
        const auto obj = [&](std::span<const double> z) {
            FlockState cur = s;
            const std::vector<Vec2> zero(cur.size());
            for (int st = 0; st < h; ++st) {
                const Disturbance d = decode_attack_step(
                    cur, alive, cfg.attacked_count,
                    z.subspan(static_cast<std::size_t>(st) * per_step, per_step));
                cur = step(cur, zero, d, params);
            }
            return -cost(cur, params);
        };
        PsoConfig pc = cfg.pso;
        pc.particle_count = 2 * cfg.beta_att * h * a;
        pc.seed_center = true;
        PsoResult r = minimize(obj, lo, hi, pc,
                               seed_for(base, static_cast<std::uint64_t>(h)));
        if (!have_best || r.best_value < best.value) {
            best = {r.best_value, std::move(r.best_point)};
            have_best = true;
        }
        if (-best.value - j_now >= delta) break; // enough damage found
    }

    return decode_attack_step(s, alive, cfg.attacked_count,
                              std::span<const double>(best.point.data(), per_step));
}

GameOutcome play(const FlockState& initial, const GameConfig& cfg,
                 const FlockParams& params, std::uint64_t seed) {
    validate(cfg, initial.size());
    const int B = initial.size();
    const bool windowed = cfg.attack == AttackKind::RandomDisplacement ||
                          cfg.attack == AttackKind::AdaptiveDisplacement;
    const int window_end = windowed ? cfg.attack_rounds : 0;

    GameOutcome out;
    out.trace.initial = initial;
    out.trace.committed_levels.push_back(cost(initial, params));

    FlockState s = initial;
    if (cfg.attack == AttackKind::None && cost(s, params) <= cfg.threshold) {
        out.controller_won = true;
        out.duration = 0;
        out.trace.converged = true;
        out.trace.final_cost = cost(s, params);
        return out;
    }

    double h_sum = 0.0;
    int steps = 0;
    for (int t = 1; t <= cfg.max_steps; ++t) {
        Disturbance d = Disturbance::none(B);
        switch (cfg.attack) {
            case AttackKind::None: break;
            case AttackKind::Removal: d = attack_brg(s, cfg, seed, t); break;
            case AttackKind::RandomDisplacement: d = attack_rdg(s, cfg, seed, t); break;
            case AttackKind::AdaptiveDisplacement:
                d = attack_ampc(s, cfg, params, seed, t, cfg.max_steps - t);
                break;
        }

        // Controller plans on the current state without seeing d.
        const std::vector<int> alive = alive_ids(s);
        const double delta = cost(s, params) / std::max(1, cfg.max_steps - t);
        dampc::NeighborhoodSolution sol = dampc::local_ampc(
            s, alive, PrefixPlan(B), delta, cfg.h_max, cfg.beta_ctrl, cfg.pso,
            params, seed_for(seed, kStreamController, static_cast<std::uint64_t>(t)));

        std::vector<Vec2> a(B);
        for (int i : alive)
            if (!sol.actions[i].empty()) a[i] = sol.actions[i][0];
        s = step(s, a, d, params);
        ++steps;
        h_sum += sol.horizon;

        const double j = cost(s, params);
        TraceStep ts;
        ts.accel = std::move(a);
        ts.dist = std::move(d);
        ts.state_after = s;
        ts.level = j;
        ts.delta = delta;
        ts.horizon = sol.horizon;
        ts.particles = sol.particles;
        out.trace.steps.push_back(std::move(ts));

        if (t > window_end && j <= cfg.threshold) {
            out.controller_won = true;
            out.duration = t - window_end;
            break;
        }
    }

    out.avg_horizon = steps ? h_sum / steps : 0.0;
    out.trace.final_cost = cost(s, params);
    out.trace.converged = out.controller_won;
    return out;
}

} // namespace games
} // namespace vform
