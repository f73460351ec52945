#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfrac/cascade.hpp"
#include "mfrac/mrm.hpp"
#include "mfrac/stats.hpp"
#include "test_util.hpp"

using namespace mfrac;

TEST_CASE("degenerate weight gives the Lebesgue cascade exactly") {
    const auto grid = MixedGrid::make(1.0, 6, 0.5);
    for (const auto& m : {ScalingModel::log_normal(0.0, LogBase::Base2),
                          ScalingModel::poisson_cascade({{1.0}, {1.0}}, LogBase::Base2)}) {
        const auto real = sample_cascade(m, grid, 4, 99);
        CHECK(real.data.values.size() == static_cast<std::size_t>(grid.L) * 64);
        for (double v : real.data.values)
            CHECK(v == std::exp2(-6.0));
    }
}

TEST_CASE("scaling identity with frozen Z: E[mass^q] 2^(n zeta(q)) = 1") {
    // depth_extra = 0 freezes the sub-cascade factor, so the identity is exact.
    const auto m = ScalingModel::log_normal(0.1, LogBase::Base2);
    const int n = 8;
    const auto grid = MixedGrid::make(1.0, n, 1.0); // 256 blocks
    const auto real = sample_cascade(m, grid, 0, 1234);
    for (double q : {1.0, 2.0}) {
        // block-level means give independent samples for the SE estimate
        std::vector<double> per_block(grid.L);
        const double scale = std::exp2(n * zeta(m, q));
        for (long j = 0; j < grid.L; ++j) {
            double s = 0.0;
            for (long k = 0; k < real.data.per_block(); ++k)
                s += std::pow(real.data.at(j, k), q);
            per_block[j] = scale * s / real.data.per_block();
        }
        CHECK(testutil::within_3se(per_block, 1.0));
    }
}

TEST_CASE("block totals are martingale-normalized: E[total] = T") {
    const auto m = ScalingModel::log_normal(0.1, LogBase::Base2);
    const auto grid = MixedGrid::make(1.0, 5, 2.2); // ~2000 blocks
    const auto real = sample_cascade(m, grid, 10, 777);
    std::vector<double> totals(grid.L);
    for (long j = 0; j < grid.L; ++j) {
        double s = 0.0;
        for (long k = 0; k < real.data.per_block(); ++k)
            s += real.data.at(j, k);
        totals[j] = s;
    }
    CHECK(testutil::within_3se(totals, 1.0));
}

TEST_CASE("aggregate sums adjacent pairs and preserves block totals") {
    Realization r;
    r.grid = MixedGrid::make(1.0, 2, 0.0);
    r.level = 2;
    r.kind = SeriesKind::Measure;
    r.values = {1.0, 2.0, 3.0, 4.0};
    const auto up1 = aggregate(r, 1);
    CHECK(up1.values == std::vector<double>{3.0, 7.0});
    const auto up2 = aggregate(r, 2);
    CHECK(up2.values == std::vector<double>{10.0});
    // one step at a time equals the combined step bit for bit
    const auto chained = aggregate(aggregate(r, 1), 1);
    CHECK(chained.values == up2.values);
    CHECK_THROWS_AS(aggregate(r, 3), Error);
}

TEST_CASE("aggregated sample matches a direct sample in distribution") {
    // Same total tree depth on both routes, so the laws agree exactly;
    // two-sample KS on block totals at the 1% level.
    const auto m = ScalingModel::log_normal(0.15, LogBase::Base2);
    const int n = 5, reps = 500;
    std::vector<double> via_aggregate(reps), direct(reps);
    const auto grid = MixedGrid::make(1.0, n, 0.0);
    for (int r = 0; r < reps; ++r) {
        const auto fine = sample_cascade(m, grid, 8, 4000 + r, n + 1);
        const auto agg = aggregate(fine.data, 1);
        double s = 0.0;
        for (double v : agg.values)
            s += v;
        via_aggregate[r] = s;
        const auto d = sample_cascade(m, grid, 9, 9000 + r, n);
        s = 0.0;
        for (double v : d.data.values)
            s += v;
        direct[r] = s;
    }
    const auto ks = ks_two_sample(via_aggregate, direct);
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("theoretical_V degenerate cases vanish exactly") {
    const auto one = ScalingModel::poisson_cascade({{1.0}, {1.0}}, LogBase::Base2);
    for (double q : {0.5, 1.0, 2.0, 3.0})
        CHECK(theoretical_V(one, q, 10000, 5, 6).value == 0.0);
    // q = 1: the statistic is identically zero for any cascade model
    const auto ln = ScalingModel::log_normal(0.3, LogBase::Base2);
    CHECK(theoretical_V(ln, 1.0, 10000, 5, 8).value == 0.0);
    CHECK_THROWS_AS(theoretical_V(ln, 2.0, 500, 5, 8), Error);
}

TEST_CASE("theoretical_V is self-consistent across independent runs") {
    const auto m = ScalingModel::log_normal(0.1, LogBase::Base2);
    const auto a = theoretical_V(m, 2.0, 100000, 21, 8, 2);
    const auto b = theoretical_V(m, 2.0, 100000, 22, 8, 2);
    CHECK(a.value > 0.0);
    const double combined = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    CHECK(std::abs(a.value - b.value) <= 3.0 * combined);
}

TEST_CASE("invalid cascade models are rejected") {
    const auto grid = MixedGrid::make(1.0, 4, 0.0);
    CHECK_THROWS_AS(sample_cascade(ScalingModel::stable_sub(0.5, 0.5), grid, 0, 1), InvalidModel);
    CHECK_THROWS_AS(sample_cascade(ScalingModel::log_normal(0.1, LogBase::Natural), grid, 0, 1),
                    InvalidModel);
    // E[W log2 W] = lambda2/2 >= 1
    CHECK_THROWS_AS(sample_cascade(ScalingModel::log_normal(2.5, LogBase::Base2), grid, 0, 1),
                    InvalidModel);
}

TEST_CASE("identical seeds reproduce bit-identical realizations across thread counts") {
    const auto m = ScalingModel::log_normal(0.2, LogBase::Base2);
    const auto grid = MixedGrid::make(1.0, 6, 1.0);
    const auto a = sample_cascade(m, grid, 5, 31337, -1, 1);
    const auto b = sample_cascade(m, grid, 5, 31337, -1, 2);
    CHECK(a.data.values == b.data.values);
    const auto c = sample_cascade(m, grid, 5, 31338, -1, 1);
    CHECK(a.data.values != c.data.values);
}
