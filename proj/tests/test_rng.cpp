#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "spikemark/rng.hpp"

using namespace spikemark;

TEST_SUITE("rng") {

TEST_CASE("splitmix64 matches the published reference sequence for seed 0") {
    // First outputs of splitmix64 seeded with 0, from the reference
    // implementation by Sebastiano Vigna.
    std::uint64_t state = 0;
    CHECK(splitmix64_next(state) == UINT64_C(0xE220A8397B1DCDAF));
    CHECK(splitmix64_next(state) == UINT64_C(0x6E789E6AA1B965F4));
    CHECK(splitmix64_next(state) == UINT64_C(0x06C45D188009454F));
    CHECK(splitmix64_next(state) == UINT64_C(0xF88BB8A8724C81EC));
}

TEST_CASE("derive_seed indexes the splitmix64 stream") {
    std::uint64_t state = 42;
    const std::uint64_t first = splitmix64_next(state);
    const std::uint64_t second = splitmix64_next(state);
    CHECK(derive_seed(42, 0) == first);
    CHECK(derive_seed(42, 1) == second);
    CHECK(derive_seed(42, 7) != derive_seed(42, 8));
    CHECK(derive_seed(42, 3) == derive_seed(42, 3));
}

TEST_CASE("identical seeds give identical streams, distinct seeds diverge") {
    rng256 a(123), b(123), c(124);
    bool all_equal = true, any_equal_c = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next(), vb = b.next(), vc = c.next();
        all_equal = all_equal && (va == vb);
        any_equal_c = any_equal_c || (va == vc);
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_c);  // 100 collisions in a row would be miraculous
}

TEST_CASE("uniform01 lies in [0,1) and uses 53 bits") {
    rng256 g(7);
    double min_seen = 1.0, max_seen = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = g.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        min_seen = std::min(min_seen, u);
        max_seen = std::max(max_seen, u);
    }
    CHECK(min_seen < 0.01);
    CHECK(max_seen > 0.99);
}

TEST_CASE("uniform maps to the requested interval") {
    rng256 g(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = g.uniform(-1.0, 1.0);
        CHECK(u >= -1.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("below produces every residue and respects the bound") {
    rng256 g(1);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t v = g.below(6);
        CHECK(v < 6);
        seen.insert(v);
    }
    CHECK(seen.size() == 6);
}

TEST_CASE("normal draws have roughly standard moments") {
    rng256 g(5);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = g.normal();
        REQUIRE(std::isfinite(z));
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("generator satisfies the uniform random bit generator interface") {
    static_assert(std::uniform_random_bit_generator<rng256>);
    CHECK(rng256::min() == 0);
    CHECK(rng256::max() == UINT64_MAX);
}

}  // TEST_SUITE
