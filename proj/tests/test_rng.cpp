#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfrac/rng.hpp"
#include "mfrac/stats.hpp"
#include "test_util.hpp"

using namespace mfrac;

TEST_CASE("streams are deterministic and tag-separated") {
    RngStream a(42, {1, 2, 3});
    RngStream b(42, {1, 2, 3});
    RngStream c(42, {1, 2, 4});
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        all_equal = all_equal && (x == b.next_u64());
        any_diff = any_diff || (x != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("uniform01 stays inside the open interval with the right moments") {
    RngStream rng(7, {purpose::noise});
    const long n = 200000;
    std::vector<double> xs(n);
    for (auto& x : xs) {
        x = rng.uniform01();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
    }
    CHECK(std::abs(testutil::mean(xs) - 0.5) <= 3.0 * std::sqrt(1.0 / 12.0 / n));
    double m2 = 0.0;
    for (double x : xs)
        m2 += (x - 0.5) * (x - 0.5);
    m2 /= n;
    CHECK(m2 == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("normal draws pass a KS test and match moments") {
    RngStream rng(11, {purpose::noise});
    std::vector<double> xs(20000);
    rng.fill_normal(xs);
    CHECK(std::abs(testutil::mean(xs)) <= 3.0 / std::sqrt(20000.0));
    CHECK(testutil::sd(xs) == doctest::Approx(1.0).epsilon(0.03));
    const auto ks = ks_normal_test(xs);
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("poisson mean and variance, small and split regimes") {
    for (double lambda : {0.3, 3.7, 300.0}) {
        RngStream rng(5, {static_cast<std::uint64_t>(lambda * 100)});
        const long n = 20000;
        std::vector<double> xs(n);
        for (auto& x : xs)
            x = static_cast<double>(rng.poisson(lambda));
        CHECK(std::abs(testutil::mean(xs) - lambda) <= 3.0 * std::sqrt(lambda / n));
        const double v = testutil::sd(xs);
        CHECK(v * v == doctest::Approx(lambda).epsilon(0.08));
    }
}

TEST_CASE("positive stable matches its Laplace transform") {
    const double alpha = 0.5;
    RngStream rng(13, {purpose::stable_cells});
    const long n = 100000;
    for (double s : {0.5, 1.0, 2.0}) {
        std::vector<double> es(n);
        RngStream r2(13, {purpose::stable_cells, static_cast<std::uint64_t>(s * 10)});
        for (auto& e : es)
            e = std::exp(-s * r2.stable_positive(alpha));
        const double target = std::exp(-std::pow(s, alpha));
        CHECK(std::abs(testutil::mean(es) - target) <= 3.0 * testutil::sem(es));
    }
    (void)rng;
}

TEST_CASE("left-skewed stable matches its exponential moments") {
    // For beta = -1, alpha in (1,2): E[e^{qX}] = exp(q^alpha |sec(pi alpha/2)|).
    const double alpha = 1.5;
    const double sec = std::abs(1.0 / std::cos(M_PI * alpha / 2.0));
    const long n = 200000;
    for (double q : {0.5, 1.0}) {
        RngStream rng(17, {static_cast<std::uint64_t>(q * 10)});
        std::vector<double> es(n);
        for (auto& e : es)
            e = std::exp(q * rng.stable_standard(alpha, -1.0));
        const double target = std::exp(std::pow(q, alpha) * sec);
        CHECK(std::abs(testutil::mean(es) - target) <= 3.0 * testutil::sem(es));
    }
}
