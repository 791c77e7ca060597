#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tracetails/gamma.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace tracetails;

TEST_CASE("gamma_pdf closed-form values") {
    CHECK(gamma_pdf(GammaParams(1, 1), 0.0) == doctest::Approx(1.0));
    CHECK(gamma_pdf(GammaParams(1, 1), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(gamma_pdf(GammaParams(2, 3), 0.0) == 0.0);
    CHECK(gamma_pdf(GammaParams(2, 3), -1.0) == 0.0);
    CHECK_THROWS_AS(gamma_pdf(GammaParams(0.5, 1), 0.0), std::domain_error);
    // Erlang-3 density x^2 e^-x / 2.
    CHECK(gamma_pdf(GammaParams(3, 1), 2.0) ==
          doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("gamma_cdf closed-form values") {
    CHECK(gamma_cdf(GammaParams(1, 1), std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(gamma_cdf(GammaParams(3, 2), 0.0) == 0.0);
    CHECK(gamma_cdf(GammaParams(2, 1), 2.0) ==
          doctest::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-13));
    // Erlang-5: 1 - e^-x sum_{k<5} x^k/k!.
    const double x = 3.7;
    double s = 0.0, term = 1.0;
    for (int k = 0; k < 5; ++k) {
        s += term;
        term *= x / (k + 1);
    }
    CHECK(gamma_cdf(GammaParams(5, 1), x) ==
          doctest::Approx(1.0 - std::exp(-x) * s).epsilon(1e-13));
}

TEST_CASE("gamma_cdf large shape behaves like a normal") {
    // Berry-Esseen scale error bound ~0.7*skewness/sqrt(a).
    for (double a : {1e4, 1e6}) {
        const GammaParams p(a, 1.0);
        for (double z : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
            const double x = a + z * std::sqrt(a);
            const double phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
            CHECK(std::fabs(gamma_cdf(p, x) - phi) < 1.5 / std::sqrt(a));
        }
    }
}

TEST_CASE("gamma moments, mode, scaling") {
    auto [m1, v1] = gamma_mean_var(GammaParams(2, 2));
    CHECK(m1 == 1.0);
    CHECK(v1 == 0.5);
    auto [m2, v2] = gamma_mean_var(GammaParams(5, 2));
    CHECK(m2 == 2.5);
    CHECK(v2 == 1.25);

    CHECK(gamma_mode(GammaParams(2, 1)) == 1.0);
    CHECK(gamma_mode(GammaParams(0.5, 3)) == 0.0);
    CHECK(gamma_mode(GammaParams(3, 2)) == 1.0);

    const GammaParams scaled = gamma_scale(GammaParams(2, 4), 2.0);
    CHECK(scaled.shape == 2.0);
    CHECK(scaled.rate == 2.0);
    CHECK_THROWS_AS(gamma_scale(GammaParams(1, 1), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gamma_scale(GammaParams(1, 1), -1.0), std::invalid_argument);
}

TEST_CASE("gamma inflection points") {
    auto [lo3, hi3] = gamma_inflection_points(GammaParams(3, 1));
    REQUIRE(lo3);
    REQUIRE(hi3);
    CHECK(*lo3 == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
    CHECK(*hi3 == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));

    auto [lo2, hi2] = gamma_inflection_points(GammaParams(2, 1));
    CHECK(!lo2);
    REQUIRE(hi2);
    CHECK(*hi2 == doctest::Approx(2.0).epsilon(1e-14));

    auto [lo1, hi1] = gamma_inflection_points(GammaParams(1, 1));
    CHECK(!lo1);
    CHECK(!hi1);
}

TEST_CASE("pdf integrates to one") {
    for (double a : {0.5, 1.0, 2.0, 10.0, 100.0}) {
        const GammaParams p(a, 1.5);
        const double hi = p.mean() + 40.0 * std::sqrt(p.variance());
        double integral;
        if (a < 1.0) {
            // Substitute x = u^(1/a) to remove the integrable pole at 0.
            integral = testutil::simpson(
                [&](double u) {
                    if (u <= 0.0) return std::pow(p.rate, a) / (a * std::tgamma(a));
                    const double x = std::pow(u, 1.0 / a);
                    return gamma_pdf(p, x) * std::pow(u, 1.0 / a - 1.0) / a;
                },
                0.0, std::pow(hi, a), 1 << 16);
        } else {
            integral = testutil::simpson([&](double x) { return gamma_pdf(p, x); }, 0.0, hi,
                                         1 << 16);
        }
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("cdf differentiates to pdf") {
    const double h = 1e-5;
    for (double a : {1.0, 2.0, 5.0, 30.0}) {
        const GammaParams p(a, 2.0);
        for (double frac : {0.2, 0.7, 1.0, 1.6, 3.0}) {
            const double x = frac * p.mean();
            const double numeric = (gamma_cdf(p, x + h) - gamma_cdf(p, x - h)) / (2.0 * h);
            CHECK(std::fabs(numeric - gamma_pdf(p, x)) <= 1e-6);
        }
    }
}

TEST_CASE("mode maximizes the density") {
    for (double a : {1.5, 2.0, 7.0, 40.0}) {
        const GammaParams p(a, 3.0);
        const double m = gamma_mode(p);
        const double fm = gamma_pdf(p, m);
        CHECK(fm >= gamma_pdf(p, m + 1e-4));
        CHECK(fm >= gamma_pdf(p, m - 1e-4));
    }
}

TEST_CASE("inflection points flip the second derivative sign") {
    const double h = 1e-5;
    for (double a : {2.5, 3.0, 8.0}) {
        const GammaParams p(a, 1.0);
        auto second = [&](double x) {
            return (gamma_pdf(p, x + h) - 2.0 * gamma_pdf(p, x) + gamma_pdf(p, x - h)) / (h * h);
        };
        auto [lo, hi] = gamma_inflection_points(p);
        for (const auto& r : {lo, hi}) {
            if (!r) continue;
            CHECK(second(*r - 1e-3) * second(*r + 1e-3) < 0.0);
            // Second derivative at the root is ~0 relative to the local scale.
            CHECK(std::fabs(second(*r)) <= 1e-5 * std::max(1.0, std::fabs(second(*r - 0.5))) + 1e-4);
        }
    }
}

TEST_CASE("scaling law for the cdf") {
    const GammaParams p(3, 2);
    for (double c : {0.25, 2.0, 17.0}) {
        const GammaParams q = gamma_scale(p, c);
        for (double x : {0.3, 1.0, 4.0}) {
            CHECK(gamma_cdf(q, x) == doctest::Approx(gamma_cdf(p, x / c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("sampling: moments and batching determinism") {
    const auto empty = gamma_sample(GammaParams(2, 2), 0, 7);
    CHECK(empty.empty());

    const auto s1 = gamma_sample(GammaParams(1, 1), 1000000, 42);
    CHECK(std::fabs(testutil::mean_of(s1) - 1.0) < 0.004); // 3 sigma band

    const auto s2 = gamma_sample(GammaParams(4, 2), 1000000, 43);
    CHECK(std::fabs(testutil::variance_of(s2) - 1.0) < 0.02);

    // Draw i is independent of the batch size.
    const auto small = gamma_sample(GammaParams(2.5, 1.5), 10, 99);
    const auto big = gamma_sample(GammaParams(2.5, 1.5), 100, 99);
    for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i] == big[i]);
}

TEST_CASE("sampling additivity") {
    // Gamma(a1,b) + Gamma(a2,b) ~ Gamma(a1+a2,b): two-sample KS below the
    // 1% critical value at n = 1e5.
    const std::size_t n = 100000;
    const auto joint = gamma_sample(GammaParams(3.5, 2.0), n, 1);
    const auto part1 = gamma_sample(GammaParams(1.25, 2.0), n, 2);
    const auto part2 = gamma_sample(GammaParams(2.25, 2.0), n, 3);
    std::vector<double> summed(n);
    for (std::size_t i = 0; i < n; ++i) summed[i] = part1[i] + part2[i];
    CHECK(testutil::ks_two_sample(joint, summed) < testutil::ks_two_sample_critical_1pct(n));
}

TEST_CASE("sample distribution matches the cdf") {
    const GammaParams p(2.5, 1.0);
    const std::size_t n = 100000;
    auto samples = gamma_sample(p, n, 11);
    const double d = testutil::ks_distance(std::move(samples),
                                           [&](double x) { return gamma_cdf(p, x); });
    CHECK(d < testutil::ks_critical_1pct(n));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(GammaParams(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GammaParams(1.0, -2.0), std::invalid_argument);
}
