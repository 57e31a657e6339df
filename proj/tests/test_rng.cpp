#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "vform/rng.hpp"

using namespace vform;

TEST_CASE("rng: uniform doubles live in [0, 1) and pass a KS check") {
    Rng rng(12345);
    const int n = 100000;
    std::vector<double> draws(n);
    for (double& d : draws) {
        d = rng.uniform();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        ks = std::max({ks, draws[i] - lo, hi - draws[i]});
    }
    // 1% critical value 1.63 / sqrt(n); a correct generator fails this with
    // probability 0.01 for an unlucky seed, so the seed above is pinned.
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("rng: ranged uniform respects bounds and scales affinely") {
    Rng a(9), b(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        const double v = b.uniform(-2.0, 6.0);
        CHECK(v == -2.0 + 8.0 * u);
        CHECK(v >= -2.0);
        CHECK(v < 6.0);
    }
}

TEST_CASE("seed_for: deterministic, order-sensitive, tag-sensitive") {
    const std::uint64_t s = 777;
    CHECK(seed_for(s, 1, 2) == seed_for(s, 1, 2));
    CHECK(seed_for(s, 1, 2) != seed_for(s, 2, 1));
    CHECK(seed_for(s, 1) != seed_for(s, 2));
    CHECK(seed_for(s, 1) != seed_for(s + 1, 1));
    // Chained derivation equals the variadic form.
    CHECK(seed_for(seed_for(s, 3), 4) == seed_for(s, 3, 4));
}

TEST_CASE("seed_for: tag grid under one base is collision-free") {
    // Every derivation chain in the library hangs off a single base per fold
    // level, so distinctness across tags of one base is the contract.
    std::vector<std::uint64_t> seen;
    for (std::uint64_t a = 1; a <= 16; ++a)
        for (std::uint64_t b = 0; b <= 16; ++b)
            seen.push_back(seed_for(99, a, b));
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("member_hash: depends on content, not storage") {
    const int a[] = {0, 2, 5};
    const int b[] = {0, 2, 5};
    const int c[] = {0, 2, 6};
    const int d[] = {0, 2};
    CHECK(member_hash(a, 3) == member_hash(b, 3));
    CHECK(member_hash(a, 3) != member_hash(c, 3));
    CHECK(member_hash(a, 3) != member_hash(d, 2));
}

TEST_CASE("rng: below covers the whole range") {
    Rng rng(5);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 7000; ++i) ++counts[rng.below(7)];
    for (int c : counts) CHECK(c > 0);
}
