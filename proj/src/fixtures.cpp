#include "vform/fixtures.hpp"

#include <cmath>

#include "vform/errors.hpp"

namespace vform {

FlockState analytic_v(int bird_count, const FlockParams& params, Vec2 apex,
                      Vec2 velocity) {
    if (bird_count < 1) throw ConfigError("analytic_v: bird_count must be >= 1");
    if (velocity.x == 0.0 && velocity.y == 0.0)
        throw ConfigError("analytic_v: velocity must be nonzero");

    const Vec2 fwd = normalized(velocity);
    const Vec2 side = perp(fwd);
    const double lat = params.upwash_mean.x;
    const double lon = params.upwash_mean.y;
    const int apex_id = (bird_count - 1) / 2;

    FlockState s = make_state(bird_count);
    for (int i = 0; i < bird_count; ++i) {
        const int depth = std::abs(i - apex_id);
        const double arm = (i < apex_id) ? 1.0 : (i > apex_id ? -1.0 : 0.0);
        s.x[i] = apex - fwd * (lon * depth) + side * (arm * lat * depth);
        s.v[i] = velocity;
    }
    return s;
}

// The sweet-spot chain is already deep inside the formation threshold
// (J ~ 2.5e-6 for default params), so the analytic layout is the fixture.
FlockState v_fixture(int bird_count) {
    if (bird_count != 3 && bird_count != 5 && bird_count != 7)
        throw ConfigError("v_fixture: bird_count must be 3, 5, or 7");
    FlockParams params;
    return analytic_v(bird_count, params);
}

} // namespace vform
