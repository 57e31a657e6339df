#include "vform/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vform/errors.hpp"
#include "vform/rng.hpp"

namespace vform {

namespace {

void validate(const PsoConfig& cfg, std::span<const double> lo, std::span<const double> hi) {
    if (cfg.particle_count < 1) throw ConfigError("pso: particle_count must be >= 1");
    if (cfg.max_iterations < 0) throw ConfigError("pso: max_iterations must be >= 0");
    if (cfg.stall_iterations < 1) throw ConfigError("pso: stall_iterations must be >= 1");
    if (!(cfg.neighborhood_fraction > 0.0) || cfg.neighborhood_fraction > 1.0)
        throw ConfigError("pso: neighborhood_fraction must be in (0, 1]");
    if (lo.size() != hi.size() || lo.empty())
        throw ConfigError("pso: bounds must be non-empty and of equal length");
    for (std::size_t d = 0; d < lo.size(); ++d)
        if (!(lo[d] <= hi[d])) throw ConfigError("pso: bounds must satisfy lo <= hi");
}

} // namespace

PsoResult minimize(const Objective& f, std::span<const double> lo,
                   std::span<const double> hi, const PsoConfig& cfg,
                   std::uint64_t seed, const PsoObserver& observer) {
    validate(cfg, lo, hi);
    const int P = cfg.particle_count;
    const int D = static_cast<int>(lo.size());
    const int nbr = std::min<int>(P, std::max<int>(2, static_cast<int>(
                        std::ceil(cfg.neighborhood_fraction * P))));

    Rng rng(seed);

    std::vector<double> pos(static_cast<std::size_t>(P) * D);
    std::vector<double> vel(static_cast<std::size_t>(P) * D);
    std::vector<double> pbest_pos(static_cast<std::size_t>(P) * D);
    std::vector<double> pbest_val(P);
    // neighborhoods[k] lists nbr particle indices whose personal bests drive
    // particle k's social term; k itself is always a member.
    std::vector<int> hood(static_cast<std::size_t>(P) * nbr);

    for (int k = 0; k < P; ++k)
        for (int d = 0; d < D; ++d)
            pos[k * D + d] = (k == 0 && cfg.seed_center)
                                 ? 0.5 * (lo[d] + hi[d])
                                 : rng.uniform(lo[d], hi[d]);
    for (int k = 0; k < P; ++k)
        for (int d = 0; d < D; ++d) {
            const double r = hi[d] - lo[d];
            vel[k * D + d] = rng.uniform(-r, r);
        }

    auto resample_hoods = [&] {
        for (int k = 0; k < P; ++k) {
            int* h = hood.data() + static_cast<std::size_t>(k) * nbr;
            h[0] = k;
            for (int m = 1; m < nbr; ++m) {
                bool dup;
                do {
                    h[m] = static_cast<int>(rng.below(P));
                    dup = false;
                    for (int q = 0; q < m; ++q)
                        if (h[q] == h[m]) { dup = true; break; }
                } while (dup);
            }
        }
    };
    resample_hoods();

    PsoResult res;
    res.best_value = std::numeric_limits<double>::infinity();
    int best_idx = 0;

    for (int k = 0; k < P; ++k) {
        const std::span<const double> xk(pos.data() + static_cast<std::size_t>(k) * D, D);
        pbest_val[k] = f(xk);
        ++res.evaluations;
        if (pbest_val[k] < res.best_value) {
            res.best_value = pbest_val[k];
            best_idx = k;
        }
    }
    std::copy(pos.begin(), pos.end(), pbest_pos.begin());
    res.best_point.assign(pbest_pos.begin() + static_cast<std::size_t>(best_idx) * D,
                          pbest_pos.begin() + static_cast<std::size_t>(best_idx) * D + D);

    int stall = 0;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        for (int k = 0; k < P; ++k) {
            const int* h = hood.data() + static_cast<std::size_t>(k) * nbr;
            int nb = h[0];
            for (int m = 1; m < nbr; ++m)
                if (pbest_val[h[m]] < pbest_val[nb]) nb = h[m];

            double* x = pos.data() + static_cast<std::size_t>(k) * D;
            double* vkD = vel.data() + static_cast<std::size_t>(k) * D;
            const double* pb = pbest_pos.data() + static_cast<std::size_t>(k) * D;
            const double* gb = pbest_pos.data() + static_cast<std::size_t>(nb) * D;
            for (int d = 0; d < D; ++d) {
                const double u1 = rng.uniform();
                const double u2 = rng.uniform();
                vkD[d] = cfg.inertia * vkD[d] + cfg.self_adjust * u1 * (pb[d] - x[d]) +
                         cfg.social_adjust * u2 * (gb[d] - x[d]);
                x[d] += vkD[d];
                if (x[d] < lo[d]) { x[d] = lo[d]; vkD[d] = 0.0; }
                else if (x[d] > hi[d]) { x[d] = hi[d]; vkD[d] = 0.0; }
            }

            const double val = f(std::span<const double>(x, D));
            ++res.evaluations;
            if (val < pbest_val[k]) {
                pbest_val[k] = val;
                std::copy(x, x + D, pbest_pos.begin() + static_cast<std::size_t>(k) * D);
            }
        }

        double iter_best = pbest_val[0];
        int iter_idx = 0;
        for (int k = 1; k < P; ++k)
            if (pbest_val[k] < iter_best) { iter_best = pbest_val[k]; iter_idx = k; }

        if (res.best_value - iter_best > cfg.stall_tolerance) {
            stall = 0;
        } else {
            ++stall;
            resample_hoods();
        }
        if (iter_best < res.best_value) {
            res.best_value = iter_best;
            res.best_point.assign(pbest_pos.begin() + static_cast<std::size_t>(iter_idx) * D,
                                  pbest_pos.begin() + static_cast<std::size_t>(iter_idx) * D + D);
        }
        res.iterations = it;

        if (observer)
            observer(PsoIterationView{it, res.best_value,
                                      std::span<const double>(pbest_val.data(), P)});
        if (stall >= cfg.stall_iterations) break;
    }
    return res;
}

PsoResult minimize(const Objective& f, double lo, double hi, int dim,
                   const PsoConfig& cfg, std::uint64_t seed,
                   const PsoObserver& observer) {
    if (dim < 1) throw ConfigError("pso: dimension must be >= 1");
    std::vector<double> l(dim, lo), h(dim, hi);
    return minimize(f, l, h, cfg, seed, observer);
}

} // namespace vform
