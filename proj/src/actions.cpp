#include "vform/actions.hpp"

#include <cmath>

#include "vform/errors.hpp"

namespace vform {

Vec2 decode_accel(Vec2 u, Vec2 v, const FlockParams& params) {
    const double linf = std::max(std::fabs(u.x), std::fabs(u.y));
    if (linf == 0.0) return {};
    const double radius = params.accel_ratio * norm(v);
    Vec2 a = u * (radius * linf / norm(u));

    const double vmax2 = params.v_max * params.v_max;
    const Vec2 vn = v + a;
    if (norm2(vn) <= vmax2) return a;
    // Largest gamma in [0,1] with ||v + gamma a|| = v_max.
    const double a2 = norm2(a);
    const double va = dot(v, a);
    const double disc = va * va + a2 * (vmax2 - norm2(v));
    if (disc >= 0.0 && a2 > 0.0) {
        const double gamma = (-va + std::sqrt(disc)) / a2;
        if (gamma >= 0.0) return a * std::min(1.0, gamma);
    }
    // Already over the cap and no feasible scaling: keep only braking accels.
    return (norm2(vn) <= norm2(v)) ? a : Vec2{};
}

int free_coords(const FlockState& s, const PrefixPlan& fixed, int h) {
    int n = 0;
    for (int i = 0; i < s.size(); ++i) {
        if (s.removed[i]) continue;
        const int len = i < static_cast<int>(fixed.size())
                            ? static_cast<int>(fixed[i].size()) : 0;
        n += std::max(0, h - len);
    }
    return 2 * n;
}

namespace {

template <typename Sink>
FlockState roll_impl(const FlockState& s, const PrefixPlan& fixed, int h,
                     std::span<const double> z, const FlockParams& params,
                     Sink&& sink) {
    if (free_coords(s, fixed, h) != static_cast<int>(z.size()))
        throw ConfigError("rollout: box point length does not match free coordinates");
    FlockState cur = s;
    std::size_t zi = 0;
    for (int t = 0; t < h; ++t) {
        for (int i = 0; i < cur.size(); ++i) {
            if (cur.removed[i]) continue;
            const int len = i < static_cast<int>(fixed.size())
                                ? static_cast<int>(fixed[i].size()) : 0;
            Vec2 a;
            if (t < len) {
                a = fixed[i][t];
            } else {
                a = decode_accel({z[zi], z[zi + 1]}, cur.v[i], params);
                zi += 2;
            }
            sink(t, i, a);
            cur.x[i] += cur.v[i];
            cur.v[i] += a;
        }
    }
    return cur;
}

} // namespace

FlockState rollout_boxed(const FlockState& s, const PrefixPlan& fixed, int h,
                         std::span<const double> z, const FlockParams& params) {
    return roll_impl(s, fixed, h, z, params, [](int, int, Vec2) {});
}

PrefixPlan decode_boxed(const FlockState& s, const PrefixPlan& fixed, int h,
                        std::span<const double> z, const FlockParams& params) {
    PrefixPlan out(s.size());
    for (int i = 0; i < s.size(); ++i)
        if (!s.removed[i]) out[i].resize(h);
    roll_impl(s, fixed, h, z, params,
              [&](int t, int i, Vec2 a) { out[i][t] = a; });
    return out;
}

FlockState rollout_union(const FlockState& s, const PrefixPlan& fixed,
                         const FlockParams&) {
    static const std::vector<Vec2> kEmpty;
    FlockState cur = s;
    for (int i = 0; i < cur.size(); ++i) {
        if (cur.removed[i]) continue;
        const auto& seq = i < static_cast<int>(fixed.size()) ? fixed[i] : kEmpty;
        for (const Vec2& a : seq) {
            cur.x[i] += cur.v[i];
            cur.v[i] += a;
        }
    }
    return cur;
}

FlockState extract(const FlockState& s, std::span<const int> members) {
    FlockState sub;
    sub.x.reserve(members.size());
    sub.v.reserve(members.size());
    sub.removed.reserve(members.size());
    for (int id : members) {
        if (id < 0 || id >= s.size()) throw ConfigError("extract: member id out of range");
        sub.x.push_back(s.x[id]);
        sub.v.push_back(s.v[id]);
        sub.removed.push_back(s.removed[id]);
    }
    return sub;
}

} // namespace vform
