#include "vform/flock.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "vform/errors.hpp"
#include "vform/rng.hpp"

namespace vform {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw ConfigError(std::string(what) + ": expected " + std::to_string(want) +
                          " entries, got " + std::to_string(got));
}

Vec2 heading_of(const FlockState& s, int i) {
    Vec2 v = s.v[i];
    if (v.x == 0.0 && v.y == 0.0)
        throw DomainError("bird " + std::to_string(i) + " has zero velocity; heading undefined");
    return normalized(v);
}

// Angle of direction d relative to unit vector f, in [-pi, pi].
double relative_angle(Vec2 f, Vec2 d) {
    return std::atan2(cross(f, d), dot(f, d));
}

} // namespace

int FlockState::alive_count() const {
    int n = 0;
    for (std::uint8_t r : removed) n += r ? 0 : 1;
    return n;
}

FlockState make_state(int bird_count) {
    if (bird_count <= 0) throw ConfigError("bird_count must be positive");
    FlockState s;
    s.x.resize(bird_count);
    s.v.resize(bird_count);
    s.removed.assign(bird_count, 0);
    return s;
}

Disturbance Disturbance::none(int bird_count) {
    Disturbance d;
    d.displacement.assign(bird_count, Vec2{});
    d.remove.assign(bird_count, 0);
    return d;
}

FlockState step(const FlockState& s, const std::vector<Vec2>& accel,
                const Disturbance& dist, const FlockParams&) {
    const std::size_t B = s.x.size();
    check_size(s.v.size(), B, "state velocities");
    check_size(s.removed.size(), B, "state removal mask");
    check_size(accel.size(), B, "accelerations");
    check_size(dist.displacement.size(), B, "disturbance displacements");
    check_size(dist.remove.size(), B, "disturbance removal mask");

    FlockState out = s;
    for (std::size_t i = 0; i < B; ++i) {
        if (s.removed[i]) continue;
        if (dist.remove[i]) {
            out.removed[i] = 1; // taken out this step: frozen from here on
            continue;
        }
        out.x[i] = s.x[i] + s.v[i] + dist.displacement[i];
        out.v[i] = s.v[i] + accel[i];
    }
    return out;
}

FlockState step(const FlockState& s, const std::vector<Vec2>& accel,
                const FlockParams& params) {
    return step(s, accel, Disturbance::none(s.size()), params);
}

double clear_view(const FlockState& s, const FlockParams& params) {
    const int B = s.size();
    const double half = params.view_angle / 2.0;
    const double wing = params.wing_span / 2.0;

    thread_local std::vector<std::pair<double, double>> arcs;
    double total = 0.0;

    for (int i = 0; i < B; ++i) {
        if (s.removed[i]) continue;
        const Vec2 f = heading_of(s, i);
        arcs.clear();

        for (int j = 0; j < B; ++j) {
            if (j == i || s.removed[j]) continue;
            const Vec2 rel = s.x[j] - s.x[i];
            if (rel.x == 0.0 && rel.y == 0.0)
                throw GeometryError("birds " + std::to_string(i) + " and " +
                                    std::to_string(j) + " are coincident");
            const Vec2 wj = perp(heading_of(s, j)) * wing;
            const Vec2 e0 = rel - wj;
            const Vec2 e1 = rel + wj;
            // Eye exactly on the wing segment: blocked angle undefined.
            const Vec2 seg = e1 - e0;
            if (cross(seg, -e0) == 0.0 && dot(-e0, -e1) <= 0.0)
                throw GeometryError("bird " + std::to_string(i) +
                                    " lies on the wing segment of bird " + std::to_string(j));

            const double a0 = relative_angle(f, e0);
            const double a1 = relative_angle(f, e1);
            // The directions hitting a segment from an off-segment point span
            // the geodesic arc (< pi) between the endpoint bearings.
            double d = std::remainder(a1 - a0, 2.0 * kPi);
            double lo = (d >= 0.0) ? a0 : a1;
            double len = std::fabs(d);
            // Shift into (-pi, pi] and split arcs crossing the +-pi seam.
            lo = std::remainder(lo, 2.0 * kPi);
            double hi = lo + len;
            auto clip = [&](double a, double b) {
                double c0 = std::max(a, -half);
                double c1 = std::min(b, half);
                if (c1 > c0) arcs.emplace_back(c0, c1);
            };
            if (hi > kPi) {
                clip(lo, kPi);
                clip(-kPi, hi - 2.0 * kPi);
            } else {
                clip(lo, hi);
            }
        }

        std::sort(arcs.begin(), arcs.end());
        double blocked = 0.0, cur_lo = 0.0, cur_hi = -1.0;
        bool open = false;
        for (auto [a, b] : arcs) {
            if (!open || a > cur_hi) {
                if (open) blocked += cur_hi - cur_lo;
                cur_lo = a;
                cur_hi = b;
                open = true;
            } else if (b > cur_hi) {
                cur_hi = b;
            }
        }
        if (open) blocked += cur_hi - cur_lo;
        total += blocked / params.view_angle;
    }
    return total;
}

double velocity_matching(const FlockState& s, const FlockParams&) {
    const int B = s.size();
    thread_local std::vector<double> speeds;
    speeds.assign(B, 0.0);
    for (int i = 0; i < B; ++i) {
        if (s.removed[i]) continue;
        speeds[i] = norm(s.v[i]);
        if (speeds[i] == 0.0)
            throw DomainError("bird " + std::to_string(i) + " has zero speed");
    }
    double total = 0.0;
    for (int i = 0; i < B; ++i) {
        if (s.removed[i]) continue;
        for (int j = 0; j < i; ++j) {
            if (s.removed[j]) continue;
            const double r = norm(s.v[i] - s.v[j]) / (speeds[i] + speeds[j]);
            total += r * r;
        }
    }
    return total;
}

double upwash_benefit(const FlockState& s, const FlockParams& params) {
    const int B = s.size();
    const double w = params.wing_span;
    const double thr = (4.0 - kPi) * w / 8.0;
    const double det = params.sigma_xx * params.sigma_yy - params.sigma_xy * params.sigma_xy;
    if (det <= 0.0 || params.sigma_xx <= 0.0)
        throw ConfigError("upwash covariance must be positive definite");

    double total = 0.0;
    for (int i = 0; i < B; ++i) {
        if (s.removed[i]) continue;
        const Vec2 fwd = heading_of(s, i);
        const Vec2 side = perp(fwd);
        double um = 0.0;
        for (int j = 0; j < B; ++j) {
            if (j == i || s.removed[j]) continue;
            const Vec2 rel = s.x[j] - s.x[i];
            const double g = dot(rel, fwd);  // how far ahead j is
            if (g <= 0.0) continue;          // only birds ahead give upwash
            const double h = std::fabs(dot(rel, side));
            const double sm = std::erf(2.0 * std::sqrt(2.0) * (h - thr));
            const double zx = h - params.upwash_mean.x;
            const double zy = g - params.upwash_mean.y;
            const double quad = (params.sigma_yy * zx * zx - 2.0 * params.sigma_xy * zx * zy +
                                 params.sigma_xx * zy * zy) / det;
            const double gauss = std::exp(-0.5 * quad);
            um += (h >= thr ? params.upwash_alpha : 1.0) * sm * gauss;
        }
        total += 1.0 - std::clamp(um, 0.0, 1.0);
    }
    return total;
}

double cost(const FlockState& s, const FlockParams& params) {
    const double cv = clear_view(s, params);
    const double vm = velocity_matching(s, params);
    const double ub = upwash_benefit(s, params);
    return cv * cv + vm * vm + (ub - 1.0) * (ub - 1.0);
}

double rollout_cost(const FlockState& s, const ActionPlan& plan,
                    const FlockParams& params) {
    FlockState cur = s;
    for (const auto& accel : plan.steps)
        cur = step(cur, accel, params);
    return cost(cur, params);
}

FlockState sample_initial(int bird_count, const InitBounds& bounds,
                          const FlockParams& params, std::uint64_t seed) {
    if (bird_count <= 0) throw ConfigError("bird_count must be positive");
    if (bounds.pos_hi.x < bounds.pos_lo.x || bounds.pos_hi.y < bounds.pos_lo.y ||
        bounds.vel_hi.x < bounds.vel_lo.x || bounds.vel_hi.y < bounds.vel_lo.y)
        throw ConfigError("initial bounds must satisfy lo <= hi");

    Rng rng(seed);
    const double dmin2 = params.min_pair_distance * params.min_pair_distance;
    constexpr int kMaxAttempts = 10000;

    FlockState s = make_state(bird_count);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (int i = 0; i < bird_count; ++i) {
            s.x[i] = {rng.uniform(bounds.pos_lo.x, bounds.pos_hi.x),
                      rng.uniform(bounds.pos_lo.y, bounds.pos_hi.y)};
            s.v[i] = {rng.uniform(bounds.vel_lo.x, bounds.vel_hi.x),
                      rng.uniform(bounds.vel_lo.y, bounds.vel_hi.y)};
        }
        bool ok = true;
        for (int i = 0; ok && i < bird_count; ++i) {
            if (s.v[i].x == 0.0 && s.v[i].y == 0.0) ok = false;
            for (int j = 0; ok && j < i; ++j)
                if (norm2(s.x[i] - s.x[j]) < dmin2) ok = false;
        }
        if (ok) return s;
    }
    throw SamplingError("could not draw " + std::to_string(bird_count) +
                        " birds with pairwise distance >= " +
                        std::to_string(params.min_pair_distance) + " in " +
                        std::to_string(kMaxAttempts) + " attempts");
}

} // namespace vform
