#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfrac/scaling.hpp"

using namespace mfrac;

namespace {

std::vector<ScalingModel> representative_models() {
    return {
        ScalingModel::log_normal(0.1, LogBase::Base2),
        ScalingModel::log_normal(0.5, LogBase::Natural),
        ScalingModel::poisson_cascade({{0.5, 1.5}, {0.5, 0.5}}, LogBase::Base2),
        ScalingModel::poisson_cascade({{0.4, 1.2}, {0.25, 0.75}}, LogBase::Natural),
        ScalingModel::poisson_cascade_lognormal_w(0.3, LogBase::Natural),
        ScalingModel::stable_sub(0.5, 0.5),
        ScalingModel::stable_super(1.5, 0.5),
    };
}

// q grid inside the model's finiteness domain, avoiding the stable families'
// infinite-slope endpoint at 0.
std::vector<double> q_grid(const ScalingModel& m, int points = 200) {
    const bool stable = m.family() == Family::StableSub || m.family() == Family::StableSuper;
    const double lo = stable ? 0.05 : -2.0;
    const double hi = 4.0;
    std::vector<double> qs(points);
    for (int i = 0; i < points; ++i)
        qs[i] = lo + (hi - lo) * i / (points - 1.0);
    return qs;
}

} // namespace

TEST_CASE("psi closed forms") {
    const auto ln = ScalingModel::log_normal(0.5, LogBase::Base2);
    CHECK(psi(ln, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(psi(ln, 2.0) == doctest::Approx(0.5).epsilon(1e-12));

    const auto st = ScalingModel::stable_sub(0.5, 0.5);
    CHECK(psi(st, 4.0) == doctest::Approx(std::sqrt(0.5) * 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(psi(st, -1.0), DomainError);

    const auto pc = ScalingModel::poisson_cascade({{0.5, 1.5}, {0.5, 0.5}}, LogBase::Natural);
    CHECK(psi(pc, 2.0) == doctest::Approx(0.5 * 0.25 + 0.5 * 2.25 - 1.0).epsilon(1e-12));
}

TEST_CASE("psi_prime closed forms and finite differences") {
    CHECK(psi_prime(ScalingModel::log_normal(0.5), 1.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(psi_prime(ScalingModel::stable_super(1.5, 1.0), 1.0) ==
          doctest::Approx(0.5).epsilon(1e-12));

    const auto degenerate = ScalingModel::poisson_cascade({{1.0}, {1.0}}, LogBase::Base2);
    for (double q : {-1.0, 0.3, 1.0, 2.5})
        CHECK(psi_prime(degenerate, q) == doctest::Approx(0.0).epsilon(1e-12));

    for (const auto& m : representative_models()) {
        for (double q : q_grid(m, 40)) {
            const double h = 1e-6;
            if (!m.q_in_domain(q - h))
                continue;
            const double fd = (psi(m, q + h) - psi(m, q - h)) / (2.0 * h);
            const double an = psi_prime(m, q);
            const double scale = std::max(1.0, std::abs(an));
            CHECK(std::abs(fd - an) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("psi normalization and convexity on a grid") {
    for (const auto& m : representative_models()) {
        CHECK(std::abs(psi(m, 0.0)) <= 1e-12);
        CHECK(std::abs(psi(m, 1.0)) <= 1e-12);
        const auto qs = q_grid(m);
        for (std::size_t i = 0; i + 2 < qs.size(); ++i) {
            const double lo = psi(m, qs[i]), mid = psi(m, qs[i + 1]), hi = psi(m, qs[i + 2]);
            CHECK(mid <= (lo + hi) / 2.0 + 1e-12);
            // zeta = q - psi concave, strictly so away from degeneracy
            const double zl = qs[i] - lo, zm = qs[i + 1] - mid, zh = qs[i + 2] - hi;
            CHECK(zm >= (zl + zh) / 2.0 - 1e-12);
        }
    }
}

TEST_CASE("zeta basics") {
    for (const auto& m : representative_models())
        CHECK(zeta(m, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zeta(ScalingModel::log_normal(0.1), 2.0) == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(zeta(ScalingModel::stable_sub(0.5, 0.5), 4.0) ==
          doctest::Approx(4.0 - std::sqrt(0.5) * 2.0).epsilon(1e-12));
}

TEST_CASE("zeta_h") {
    const auto any = ScalingModel::log_normal(0.3);
    CHECK(zeta_h(any, 0.5, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zeta_h(ScalingModel::log_normal(0.05), 0.65, 2.0) ==
          doctest::Approx(1.25).epsilon(1e-12));
    CHECK(zeta_h(ScalingModel::log_normal(0.1), 0.5, 3.0) ==
          doctest::Approx(1.4625).epsilon(1e-12));
    CHECK_THROWS_AS(zeta_h(any, 0.3, 2.0), InvalidH);
    CHECK_THROWS_AS(zeta_h(any, 1.0, 2.0), InvalidH);
}

TEST_CASE("critical exponents: log-normal example") {
    const auto m = ScalingModel::log_normal(0.5, LogBase::Base2);
    const auto ce0 = critical_exponents(m, 0.0);
    CHECK(std::abs(ce0.q_0 - 2.0) <= 1e-9);
    CHECK(std::abs(ce0.q_max - 4.0) <= 1e-9);
    const auto ce1 = critical_exponents(m, 1.0);
    CHECK(std::abs(ce1.q_chi - std::sqrt(8.0)) <= 1e-9);
    CHECK(ce0.q_0 > 1.0);
    CHECK(ce1.q_chi > ce1.q_0);
}

TEST_CASE("critical exponents: defining inequalities have slack around the roots") {
    for (const auto& m : representative_models()) {
        if (psi_prime(m, 1.0) >= 1.0)
            continue;
        const double chi = 0.7;
        const auto ce = critical_exponents(m, chi);
        auto g = [&](double q) { return q * psi_prime(m, q) - psi(m, q); };
        if (std::isfinite(ce.q_0)) {
            CHECK(g(ce.q_0 - 1e-6) < 1.0);
            CHECK(g(ce.q_0 + 1e-6) > 1.0);
        }
        if (std::isfinite(ce.q_chi)) {
            CHECK(g(ce.q_chi - 1e-6) < 1.0 + chi);
            CHECK(g(ce.q_chi + 1e-6) > 1.0 + chi);
        }
        if (std::isfinite(ce.q_max)) {
            CHECK(zeta(m, ce.q_max - 1e-6) > 1.0);
            CHECK(zeta(m, ce.q_max + 1e-6) < 1.0);
        }
    }
}

TEST_CASE("q_chi is nondecreasing in chi") {
    for (const auto& m : representative_models()) {
        if (psi_prime(m, 1.0) >= 1.0)
            continue;
        double prev = 0.0;
        for (double chi : {0.0, 0.25, 0.5, 1.0, 2.0}) {
            const auto ce = critical_exponents(m, chi);
            CHECK(ce.q_chi >= prev);
            prev = ce.q_chi;
        }
    }
}

TEST_CASE("stable q_max infinity and rejection") {
    // sigma^alpha <= 1: zeta nondecreasing, q_max infinite
    const auto st = ScalingModel::stable_sub(0.5, 0.5);
    CHECK(std::isinf(critical_exponents(st, 0.0).q_max));
    // psi'(1) >= 1 makes the model unusable: lognormal psi'(1) = lambda2/2
    CHECK_THROWS_AS(critical_exponents(ScalingModel::log_normal(2.0), 0.0), ModelUnusable);
}

TEST_CASE("moment gap and the convexity bound") {
    for (const auto& m : representative_models())
        CHECK(moment_gap(m, 2.0, 1.0) == doctest::Approx(psi(m, 2.0)).epsilon(1e-12));

    const auto ln = ScalingModel::log_normal(0.1);
    CHECK(moment_gap(ln, 2.0, 2.0) == doctest::Approx(0.4).epsilon(1e-12));
    // eq-style bound with chi = 0.5: 0 < psi(2q) - 2 psi(q) < (p-1)(1+chi)
    CHECK(moment_gap(ln, 2.0, 2.0) > 0.0);
    CHECK(moment_gap(ln, 2.0, 2.0) < 1.5);

    for (const auto& m : representative_models()) {
        if (psi_prime(m, 1.0) >= 1.0)
            continue;
        const double chi = 0.5;
        const auto ce = critical_exponents(m, chi);
        for (double q : q_grid(m, 60)) {
            if (!(q > 1.0) || !(2.0 * q < ce.q_chi) || !m.q_in_domain(2.0 * q))
                continue;
            const double gap = moment_gap(m, 2.0, q);
            CHECK(gap > 0.0);
            CHECK(gap < 1.0 + chi);
        }
    }
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(ScalingModel::stable_sub(1.2, 0.5), InvalidModel);
    CHECK_THROWS_AS(ScalingModel::stable_super(0.7, 0.5), InvalidModel);
    CHECK_THROWS_AS(ScalingModel::stable_super(1.5, -1.0), InvalidModel);
    // E[W] must be 1
    CHECK_THROWS_AS(ScalingModel::poisson_cascade({{0.5, 1.4}, {0.5, 0.5}}, LogBase::Base2),
                    InvalidModel);
    CHECK_THROWS_AS(ScalingModel::poisson_cascade({{0.0, 2.0}, {0.5, 0.5}}, LogBase::Base2),
                    InvalidModel);
    CHECK_THROWS_AS(ScalingModel::log_normal(-0.1), InvalidModel);
}
