#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tracetails/rng.hpp"
#include "test_util.hpp"

#include <cmath>
#include <set>

using namespace tracetails;

TEST_CASE("counter rng is a pure function of (seed, stream, index, slot)") {
    CounterRng a(123), b(123), c(124);
    CHECK(a.bits(1, 2, 3) == b.bits(1, 2, 3));
    CHECK(a.bits(1, 2, 3) != c.bits(1, 2, 3));
    CHECK(a.bits(1, 2, 3) != a.bits(1, 2, 4));
    CHECK(a.bits(1, 2, 3) != a.bits(1, 3, 3));
    CHECK(a.bits(1, 2, 3) != a.bits(2, 2, 3));
}

TEST_CASE("uniforms look uniform") {
    CounterRng rng(7);
    const std::size_t n = 100000;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = rng.uniform(0, i);
        CHECK(u[i] > 0.0);
        CHECK(u[i] < 1.0);
    }
    const double d = testutil::ks_distance(std::move(u), [](double x) { return x; });
    CHECK(d < testutil::ks_critical_1pct(n));
}

TEST_CASE("inverse normal cdf round-trips through erfc") {
    for (double p : {1e-12, 1e-6, 0.02425, 0.3, 0.5, 0.77, 0.97, 1.0 - 1e-7}) {
        const double z = inverse_normal_cdf(p);
        const double back = 0.5 * std::erfc(-z / std::sqrt(2.0));
        CHECK(back == doctest::Approx(p).epsilon(2e-13));
    }
    CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
    CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::invalid_argument);
}

TEST_CASE("normal draws have the right moments") {
    CounterRng rng(2024);
    const std::size_t n = 1000000;
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal(5, i);
    CHECK(std::fabs(testutil::mean_of(z)) < 0.003); // 3 sigma
    CHECK(std::fabs(testutil::variance_of(z) - 1.0) < 0.006);
}

TEST_CASE("gamma draws do not collide across indices") {
    CounterRng rng(5);
    std::set<double> seen;
    for (std::size_t i = 0; i < 1000; ++i) seen.insert(rng.gamma(2.0, 1.0, 0, i));
    CHECK(seen.size() == 1000);
}

TEST_CASE("gamma draws with shape below one") {
    CounterRng rng(6);
    const std::size_t n = 200000;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.gamma(0.5, 1.0, 0, i);
    CHECK(std::fabs(testutil::mean_of(x) - 0.5) < 0.01);
    CHECK(std::fabs(testutil::variance_of(x) - 0.5) < 0.02);
}
