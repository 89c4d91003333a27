#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "te/rng.hpp"
#include "te/simd/distance.hpp"

#include <vector>

using namespace te;

TEST_CASE("dispatched kernel matches the scalar reference") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + rng.uniform_below(300);
        std::vector<double> a(d), b(d);
        for (std::size_t i = 0; i < d; ++i) {
            a[i] = 200.0 * rng.uniform() - 100.0;
            b[i] = 200.0 * rng.uniform() - 100.0;
        }
        const double ref = simd::squared_distance_scalar(a.data(), b.data(), d);
        const double got = simd::squared_distance(a.data(), b.data(), d);
        // FMA and lane reassociation change rounding, nothing more.
        CHECK(got == doctest::Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("kernel edge cases") {
    CHECK(simd::squared_distance(nullptr, nullptr, 0) == 0.0);
    const double x = 3.0, y = -1.5;
    CHECK(simd::squared_distance(&x, &y, 1) == doctest::Approx(20.25));
    std::vector<double> same(37, 1.25);
    CHECK(simd::squared_distance(same.data(), same.data(), same.size()) == 0.0);
}

TEST_CASE("a real variant is selected on this host") {
    const auto name = simd::dispatch_name();
    CHECK((name == "scalar" || name == "avx2" || name == "neon"));
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        CHECK(name == "avx2");
    }
#endif
}
