#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "vform/errors.hpp"
#include "vform/rng.hpp"
#include "vform/smc.hpp"

using namespace vform;
using namespace vform::smc;

TEST_CASE("smc: sample size for the standard plan") {
    // 4 ln(200) / 0.01 = 2119.33..., rounded up.
    CHECK(required_samples(0.1, 0.01) == 2120);
    CHECK(required_samples(1.0, 0.5) == 6); // ceil(4 ln 4)
}

TEST_CASE("smc: halving epsilon exactly quadruples the bound") {
    // The raw bound scales by 4 bitwise: same log factor, epsilon^2 in the
    // denominator, and multiplying a double by 4 is exact.
    for (double eps : {0.5, 0.2, 0.1, 0.033}) {
        for (double del : {0.3, 0.01}) {
            CHECK(chernoff_bound(eps / 2.0, del) == 4.0 * chernoff_bound(eps, del));
        }
    }
}

TEST_CASE("smc: sample size is monotone in both parameters") {
    CHECK(required_samples(0.05, 0.01) > required_samples(0.1, 0.01));
    CHECK(required_samples(0.1, 0.001) > required_samples(0.1, 0.01));
    CHECK_THROWS_AS(required_samples(0.0, 0.01), ConfigError);
    CHECK_THROWS_AS(required_samples(0.1, 1.0), ConfigError);
}

TEST_CASE("smc: constant success estimates one") {
    const Experiment always = [](std::uint64_t seed) {
        RunRecord r;
        r.seed = seed;
        r.success = true;
        r.duration = 3.0;
        r.avg_horizon = 2.0;
        r.avg_neighborhood = 4.0;
        return r;
    };
    const RunStats st = estimate(always, 50, 7, 1);
    CHECK(st.total == 50);
    CHECK(st.successes == 50);
    CHECK(st.success_rate == 1.0);
    CHECK(st.mean_duration == 3.0);
    CHECK(st.mean_horizon == 2.0);
    CHECK(st.mean_neighborhood == 4.0);
    for (int i = 0; i < 50; ++i) CHECK(st.records[i].seed == run_seed(7, i));
}

TEST_CASE("smc: constructed half-success oracle estimates one half") {
    // Success iff the run seed belongs to the even-index half of the batch:
    // exact 0.5 by construction, resolved through the documented derivation.
    const std::uint64_t master = 99;
    const int n = 200;
    std::set<std::uint64_t> even;
    for (int i = 0; i < n; i += 2) even.insert(run_seed(master, i));
    const Experiment half = [&](std::uint64_t seed) {
        RunRecord r;
        r.seed = seed;
        r.success = even.count(seed) > 0;
        r.duration = 1.0;
        return r;
    };
    const RunStats st = estimate(half, n, master, 1);
    CHECK(st.successes == n / 2);
    CHECK(st.success_rate == 0.5);
}

TEST_CASE("smc: zero successes leave metric means undefined") {
    const Experiment never = [](std::uint64_t seed) {
        RunRecord r;
        r.seed = seed;
        return r;
    };
    const RunStats st = estimate(never, 10, 1, 1);
    CHECK(st.successes == 0);
    CHECK(st.success_rate == 0.0);
    CHECK(std::isnan(st.mean_duration));
    CHECK(std::isnan(st.mean_horizon));
    CHECK(std::isnan(st.mean_neighborhood));
}

TEST_CASE("smc: records are identical for any worker count") {
    const Experiment runner = [](std::uint64_t seed) {
        Rng rng(seed);
        RunRecord r;
        r.seed = seed;
        r.success = rng.uniform() < 0.7;
        r.duration = rng.uniform(1.0, 9.0);
        r.avg_horizon = rng.uniform(1.0, 5.0);
        r.avg_neighborhood = rng.uniform(2.0, 7.0);
        r.final_cost = rng.uniform();
        return r;
    };
    const RunStats a = estimate(runner, 97, 1234, 1);
    const RunStats b = estimate(runner, 97, 1234, 3);
    const RunStats c = estimate(runner, 97, 1234, 8);
    CHECK(a.records == b.records);
    CHECK(a.records == c.records);
    CHECK(a.successes == b.successes);
    CHECK(a.success_rate == c.success_rate);
}

TEST_CASE("smc: a failing run aborts the batch with its seed") {
    const Experiment flaky = [](std::uint64_t seed) {
        if (seed == run_seed(5, 7)) throw std::runtime_error("boom");
        RunRecord r;
        r.seed = seed;
        r.success = true;
        return r;
    };
    for (int workers : {1, 4}) {
        try {
            estimate(flaky, 20, 5, workers);
            FAIL("batch should have aborted");
        } catch (const BatchError& e) {
            CHECK(e.run_seed == run_seed(5, 7));
        }
    }
}

TEST_CASE("smc: invalid batch requests are rejected") {
    const Experiment noop = [](std::uint64_t seed) {
        RunRecord r;
        r.seed = seed;
        return r;
    };
    CHECK_THROWS_AS(estimate(noop, 0, 1, 1), ConfigError);
    CHECK_THROWS_AS(estimate(Experiment{}, 5, 1, 1), ConfigError);
}
