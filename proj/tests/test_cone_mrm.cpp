#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfrac/mrm.hpp"
#include "mfrac/rng.hpp"
#include "test_util.hpp"

using namespace mfrac;

namespace {

// Numeric double-integral oracle for mu(A_l(u) n A_l(u+tau)). Substituting
// v = 1/t turns Int t^-2 dt ds into Int dv ds with the inner s-integral the
// overlap length of two width-min(1/v,T) intervals at distance tau. Simpson
// on the smooth pieces (breakpoints at v = 1/T and v = 1/tau).
double overlap_oracle(double T, double l, double tau) {
    tau = std::abs(tau);
    auto cross = [&](double v) {
        const double width = std::min(1.0 / v, T);
        return std::max(0.0, width - tau);
    };
    auto simpson = [&](double a, double b, int panels) {
        if (b <= a)
            return 0.0;
        const double h = (b - a) / panels;
        double s = cross(a) + cross(b);
        for (int i = 1; i < panels; ++i)
            s += cross(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    std::vector<double> breaks{0.0, 1.0 / T};
    if (tau > 0.0 && 1.0 / tau < 1.0 / l)
        breaks.push_back(1.0 / tau);
    breaks.push_back(1.0 / l);
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        total += simpson(breaks[i], breaks[i + 1], 2000);
    return total;
}

} // namespace

TEST_CASE("cone_overlap closed form against the quadrature oracle") {
    CHECK(cone_overlap(1.0, 0.1, 0.0) == doctest::Approx(1.0 + std::log(10.0)).epsilon(1e-12));
    CHECK(cone_overlap(1.0, 0.1, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(cone_overlap(1.0, 0.1, 1.5) == 0.0);
    CHECK_THROWS_AS(cone_overlap(1.0, 1.0, 0.2), DomainError);
    CHECK_THROWS_AS(ConeGeometry(1.0, 2.0), DomainError);

    RngStream rng(2024, {1});
    for (int i = 0; i < 60; ++i) {
        const double l = std::exp(rng.uniform(std::log(1e-4), std::log(0.5)));
        const double tau = rng.uniform(0.0, 1.3);
        const double closed = cone_overlap(1.0, l, tau);
        const double numeric = overlap_oracle(1.0, l, tau);
        CHECK(std::abs(closed - numeric) < 1e-6);
    }
    CHECK(ConeGeometry(1.0, 0.01).mu() == doctest::Approx(1.0 + std::log(100.0)));
    // mu(A_l(u)) equals the overlap function at lag 0
    for (double l : {0.5, 0.01, 1e-4})
        CHECK(ConeGeometry(1.0, l).mu() == cone_overlap(1.0, l, 0.0));
}

TEST_CASE("gaussian field: unit exponential moment and closed-form covariance") {
    const auto m = ScalingModel::log_normal(0.2);
    const long mesh = 1024;
    const ConeGeometry geom(1.0, std::exp2(-10.0));
    const WlPlan plan(m, geom, mesh);
    const double mean_w = -0.5 * 0.2 * geom.mu();
    const int reps = 300;
    std::vector<double> expw(reps), cov_half_lag(reps);
    std::vector<double> w;
    for (int r = 0; r < reps; ++r) {
        RngStream rng(50 + r, {purpose::gauss_field});
        plan.sample(rng, w);
        double e = 0.0, c = 0.0;
        const long lag = mesh / 2; // distance 0.5
        for (long i = 0; i < mesh; ++i)
            e += std::exp(w[i]);
        for (long i = 0; i + lag < mesh; ++i)
            c += (w[i] - mean_w) * (w[i + lag] - mean_w);
        expw[r] = e / mesh;
        cov_half_lag[r] = c / (mesh - lag);
    }
    CHECK(testutil::within_3se(expw, 1.0));
    CHECK(std::abs(testutil::mean(cov_half_lag) - 0.2 * std::log(2.0)) <=
          3.0 * testutil::sem(cov_half_lag));
}

TEST_CASE("poisson field: cone point count and unit exponential moment") {
    const auto m = ScalingModel::poisson_cascade({{0.5, 1.5}, {0.5, 0.5}});
    const ConeGeometry geom(1.0, std::exp2(-6.0));
    const double u = 0.37;
    const int reps = 3000;
    std::vector<double> counts(reps);
    for (int r = 0; r < reps; ++r) {
        RngStream rng(900 + r, {purpose::poisson_points});
        const auto pts = sample_cone_points(m, geom, -0.5, 1.5, rng);
        long c = 0;
        for (const auto& p : pts)
            if (std::abs(p.s - u) < std::min(p.t, 1.0) / 2.0)
                ++c;
        counts[r] = static_cast<double>(c);
    }
    CHECK(std::abs(testutil::mean(counts) - geom.mu()) <= 3.0 * testutil::sem(counts));

    const long mesh = 256;
    const WlPlan plan(m, ConeGeometry(1.0, 1.0 / mesh), mesh);
    std::vector<double> expw(400);
    std::vector<double> w;
    for (int r = 0; r < 400; ++r) {
        RngStream rng(7000 + r, {purpose::poisson_points});
        plan.sample(rng, w);
        double e = 0.0;
        for (double v : w)
            e += std::exp(v);
        expw[r] = e / mesh;
    }
    CHECK(testutil::within_3se(expw, 1.0));
}

TEST_CASE("stable fields keep the unit exponential moment") {
    const long mesh = 256;
    for (const auto& m :
         {ScalingModel::stable_sub(0.5, 0.3), ScalingModel::stable_super(1.5, 0.3)}) {
        const WlPlan plan(m, ConeGeometry(1.0, 1.0 / mesh), mesh);
        std::vector<double> expw(400);
        std::vector<double> w;
        for (int r = 0; r < 400; ++r) {
            RngStream rng(3000 + r, {purpose::stable_cells});
            plan.sample(rng, w);
            double e = 0.0;
            for (double v : w)
                e += std::exp(v);
            expw[r] = e / mesh;
        }
        CHECK(testutil::within_3se(expw, 1.0));
    }
}

TEST_CASE("degenerate MRM is exactly Lebesgue") {
    const auto grid = MixedGrid::make(1.0, 6, 0.0);
    const auto mrm = sample_mrm(ScalingModel::log_normal(0.0), grid, 3, 3);
    for (double v : mrm.data.values)
        CHECK(v == std::exp2(-6.0));
}

TEST_CASE("MRM masses have mean Delta") {
    const auto grid = MixedGrid::make(1.0, 8, 1.375); // 2048 blocks
    const auto mrm = sample_mrm(ScalingModel::log_normal(0.1), grid, 3, 33, -1, 2);
    std::vector<double> block_means(grid.L);
    for (long j = 0; j < grid.L; ++j) {
        double s = 0.0;
        for (long k = 0; k < mrm.data.per_block(); ++k)
            s += mrm.data.at(j, k);
        block_means[j] = s / mrm.data.per_block();
    }
    CHECK(std::abs(testutil::mean(block_means) - grid.delta) <=
          3.0 * testutil::sem(block_means));
}

TEST_CASE("scaling law in law: moments match across one dyadic refinement") {
    // Independent samples at levels n and n+1, each with its own cutoff, so
    // E[M^q(Delta_{n})] = 2^{zeta(q)} E[M^q(Delta_{n+1})] up to MC error.
    const auto m = ScalingModel::log_normal(0.1);
    const int n = 6;
    const auto grid = MixedGrid::make(1.0, n, 1.3); // 244 blocks
    const auto coarse = sample_mrm(m, grid, 3, 111, n, 2);
    const auto fine = sample_mrm(m, grid, 3, 222, n + 1, 2);
    for (double q : {1.0, 1.5, 2.0}) {
        std::vector<double> ratio_samples(grid.L);
        const double scale = std::exp2(zeta(m, q));
        for (long j = 0; j < grid.L; ++j) {
            double a = 0.0, b = 0.0;
            for (long k = 0; k < coarse.data.per_block(); ++k)
                a += power_q(coarse.data.at(j, k), q);
            for (long k = 0; k < fine.data.per_block(); ++k)
                b += power_q(fine.data.at(j, k), q);
            ratio_samples[j] =
                a / coarse.data.per_block() - scale * b / fine.data.per_block();
        }
        CHECK(testutil::within_3se(ratio_samples, 0.0));
    }
}

TEST_CASE("empirical_moment basics") {
    Realization r;
    r.grid = MixedGrid::make(1.0, 3, 0.0);
    r.level = 3;
    r.values.assign(8, 0.25);
    CHECK(empirical_moment(r, 2.0) == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(empirical_moment(r, 0.0) == 1.0);
    CHECK_THROWS_AS(empirical_moment(r, -1.0), DomainError);
}

TEST_CASE("MRM reproducibility across thread counts") {
    const auto grid = MixedGrid::make(1.0, 6, 1.0);
    const auto m = ScalingModel::log_normal(0.15);
    const auto a = sample_mrm(m, grid, 3, 404, -1, 1);
    const auto b = sample_mrm(m, grid, 3, 404, -1, 2);
    CHECK(a.data.values == b.data.values);
    CHECK(a.field == b.field);
}
