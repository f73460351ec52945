#include "mfrac/scaling.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <utility>

namespace mfrac {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kBisectTol = 1e-9;
constexpr double kBracketCap = 1e6;

// Bisection for an increasing function f with f(lo) < target < f(hi).
template <typename F>
double bisect_increasing(F&& f, double lo, double hi, double target) {
    for (int it = 0; it < 200 && hi - lo > kBisectTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

ScalingModel ScalingModel::log_normal(double lambda2, LogBase base) {
    ScalingModel m;
    m.family_ = Family::LogNormal;
    m.base_ = base;
    m.lambda2_ = lambda2;
    m.validate();
    return m;
}

ScalingModel ScalingModel::poisson_cascade(DiscreteW w, LogBase base) {
    ScalingModel m;
    m.family_ = Family::PoissonCascade;
    m.base_ = base;
    m.w_ = std::move(w);
    m.validate();
    return m;
}

ScalingModel ScalingModel::poisson_cascade_lognormal_w(double s2, LogBase base) {
    ScalingModel m;
    m.family_ = Family::PoissonCascade;
    m.base_ = base;
    m.w_s2_ = s2;
    m.validate();
    return m;
}

ScalingModel ScalingModel::stable_sub(double alpha, double sigma) {
    ScalingModel m;
    m.family_ = Family::StableSub;
    m.base_ = LogBase::Natural;
    m.alpha_ = alpha;
    m.sigma_ = sigma;
    m.validate();
    return m;
}

ScalingModel ScalingModel::stable_super(double alpha, double sigma) {
    ScalingModel m;
    m.family_ = Family::StableSuper;
    m.base_ = LogBase::Natural;
    m.alpha_ = alpha;
    m.sigma_ = sigma;
    m.validate();
    return m;
}

void ScalingModel::validate() const {
    switch (family_) {
    case Family::LogNormal:
        if (!(lambda2_ >= 0.0) || !std::isfinite(lambda2_))
            throw InvalidModel("lognormal: lambda2 must be finite and >= 0");
        break;
    case Family::PoissonCascade:
        if (!w_.atoms.empty()) {
            if (w_.atoms.size() > 64)
                throw InvalidModel("poisson cascade: at most 64 atoms supported");
            if (w_.atoms.size() != w_.probs.size())
                throw InvalidModel("poisson cascade: atoms/probs size mismatch");
            double psum = 0.0, mean = 0.0;
            for (std::size_t i = 0; i < w_.atoms.size(); ++i) {
                if (!(w_.atoms[i] > 0.0) || !std::isfinite(w_.atoms[i]))
                    throw InvalidModel("poisson cascade: atoms must be finite and > 0");
                if (!(w_.probs[i] > 0.0))
                    throw InvalidModel("poisson cascade: probabilities must be > 0");
                psum += w_.probs[i];
                mean += w_.probs[i] * w_.atoms[i];
            }
            if (std::abs(psum - 1.0) > 1e-9)
                throw InvalidModel("poisson cascade: probabilities must sum to 1");
            if (std::abs(mean - 1.0) > 1e-12)
                throw InvalidModel("poisson cascade: E[W] must equal 1 (got " +
                                   std::to_string(mean) + ")");
        } else if (!(w_s2_ >= 0.0) || !std::isfinite(w_s2_)) {
            throw InvalidModel("poisson cascade: log-normal W parameter s2 must be >= 0");
        }
        break;
    case Family::StableSub:
        if (!(alpha_ > 0.0 && alpha_ < 1.0))
            throw InvalidModel("stable(sub): alpha must be in (0,1)");
        if (!(sigma_ > 0.0))
            throw InvalidModel("stable(sub): sigma must be > 0");
        break;
    case Family::StableSuper:
        if (!(alpha_ > 1.0 && alpha_ < 2.0))
            throw InvalidModel("stable(super): alpha must be in (1,2)");
        if (!(sigma_ > 0.0))
            throw InvalidModel("stable(super): sigma must be > 0");
        break;
    }
}

std::string ScalingModel::describe() const {
    std::ostringstream os;
    switch (family_) {
    case Family::LogNormal:
        os << "lognormal(lambda2=" << lambda2_ << ")";
        break;
    case Family::PoissonCascade:
        if (w_is_discrete())
            os << "poisson(discrete W, " << w_.atoms.size() << " atoms)";
        else
            os << "poisson(lognormal W, s2=" << w_s2_ << ")";
        break;
    case Family::StableSub:
        os << "stable(alpha=" << alpha_ << ", sigma=" << sigma_ << ")";
        break;
    case Family::StableSuper:
        os << "stable(alpha=" << alpha_ << ", sigma=" << sigma_ << ")";
        break;
    }
    os << (base_ == LogBase::Base2 ? " [base2]" : " [natural]");
    return os.str();
}

bool ScalingModel::has_weight_law() const {
    return family_ == Family::LogNormal || family_ == Family::PoissonCascade;
}

bool ScalingModel::q_in_domain(double q) const {
    if (!std::isfinite(q))
        return false;
    if (family_ == Family::StableSub || family_ == Family::StableSuper)
        return q >= 0.0;
    return true;
}

double ScalingModel::weight_log_moment(double q) const {
    switch (family_) {
    case Family::LogNormal:
        // Cascade weight W = exp(-s^2/2 + s Z), s^2 = lambda2 * ln 2.
        return lambda2_ * kLn2 * q * (q - 1.0) / 2.0;
    case Family::PoissonCascade:
        if (w_is_discrete()) {
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < w_.atoms.size(); ++i)
                top = std::max(top, q * std::log(w_.atoms[i]) + std::log(w_.probs[i]));
            double s = 0.0;
            for (std::size_t i = 0; i < w_.atoms.size(); ++i)
                s += std::exp(q * std::log(w_.atoms[i]) + std::log(w_.probs[i]) - top);
            return top + std::log(s);
        }
        return w_s2_ * q * (q - 1.0) / 2.0;
    default:
        throw DomainError("model has no weight law: " + describe());
    }
}

double ScalingModel::weight_log_moment_dq(double q) const {
    switch (family_) {
    case Family::LogNormal:
        return lambda2_ * kLn2 * (2.0 * q - 1.0) / 2.0;
    case Family::PoissonCascade:
        if (w_is_discrete()) {
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < w_.atoms.size(); ++i)
                top = std::max(top, q * std::log(w_.atoms[i]) + std::log(w_.probs[i]));
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < w_.atoms.size(); ++i) {
                const double lw = std::log(w_.atoms[i]);
                const double e = std::exp(q * lw + std::log(w_.probs[i]) - top);
                num += e * lw;
                den += e;
            }
            return num / den;
        }
        return w_s2_ * (2.0 * q - 1.0) / 2.0;
    default:
        throw DomainError("model has no weight law: " + describe());
    }
}

double ScalingModel::weight_moment(double q) const { return std::exp(weight_log_moment(q)); }

double ScalingModel::weight_moment_dq(double q) const {
    return weight_moment(q) * weight_log_moment_dq(q);
}

double psi(const ScalingModel& model, double q) {
    if (!model.q_in_domain(q))
        throw DomainError("psi: q outside finiteness domain of " + model.describe());
    switch (model.family()) {
    case Family::LogNormal:
        // Same closed form in both conventions by construction.
        return model.lambda2() * q * (q - 1.0) / 2.0;
    case Family::PoissonCascade:
        if (model.log_base() == LogBase::Base2)
            return model.weight_log_moment(q) / kLn2;
        return std::expm1(model.weight_log_moment(q));
    case Family::StableSub:
        return std::pow(model.sigma(), model.alpha()) * (q - std::pow(q, model.alpha()));
    case Family::StableSuper:
        return std::pow(model.sigma(), model.alpha()) * (std::pow(q, model.alpha()) - q);
    }
    throw Error("unreachable");
}

double psi_prime(const ScalingModel& model, double q) {
    if (!model.q_in_domain(q))
        throw DomainError("psi_prime: q outside finiteness domain of " + model.describe());
    switch (model.family()) {
    case Family::LogNormal:
        return model.lambda2() * (2.0 * q - 1.0) / 2.0;
    case Family::PoissonCascade:
        if (model.log_base() == LogBase::Base2)
            return model.weight_log_moment_dq(q) / kLn2;
        return model.weight_moment_dq(q);
    case Family::StableSub:
        return std::pow(model.sigma(), model.alpha()) *
               (1.0 - model.alpha() * std::pow(q, model.alpha() - 1.0));
    case Family::StableSuper:
        return std::pow(model.sigma(), model.alpha()) *
               (model.alpha() * std::pow(q, model.alpha() - 1.0) - 1.0);
    }
    throw Error("unreachable");
}

double zeta(const ScalingModel& model, double q) { return q - psi(model, q); }

double zeta_h(const ScalingModel& model, double H, double q) {
    if (!(H >= 0.5 && H < 1.0))
        throw InvalidH("zeta_h: H must be in [1/2, 1)");
    if (H == 0.5)
        return zeta(model, q / 2.0);
    return q * H - psi(model, q);
}

namespace {

// Largest atom of a discrete W and the total probability it carries.
std::pair<double, double> dominant_atom(const DiscreteW& w) {
    double wmax = 0.0;
    for (double a : w.atoms)
        wmax = std::max(wmax, a);
    double pmax = 0.0;
    for (std::size_t i = 0; i < w.atoms.size(); ++i)
        if (w.atoms[i] == wmax)
            pmax += w.probs[i];
    return {wmax, pmax};
}

// sup_q { q psi'(q) - psi(q) }. Finite only for the base-2 discrete cascade,
// where the slack saturates at -log2(p(max atom)); degenerate laws give 0.
double slack_supremum(const ScalingModel& m) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (m.family()) {
    case Family::LogNormal:
        return m.lambda2() == 0.0 ? 0.0 : inf;
    case Family::PoissonCascade:
        if (m.w_is_discrete()) {
            const auto [wmax, pmax] = dominant_atom(m.discrete_w());
            if (m.log_base() == LogBase::Base2)
                return -std::log2(pmax);
            return wmax <= 1.0 ? 0.0 : inf; // wmax <= 1 with E[W]=1 means W == 1
        }
        return m.w_lognormal_s2() == 0.0 ? 0.0 : inf;
    default:
        return inf;
    }
}

// True when zeta(q) = q - psi(q) never crosses back below 1 (q_max = +inf):
// zeta is concave with zeta(1) = 1, so this holds iff its asymptotic slope
// is nonnegative.
bool zeta_stays_above_one(const ScalingModel& m) {
    switch (m.family()) {
    case Family::LogNormal:
        return m.lambda2() == 0.0;
    case Family::PoissonCascade:
        if (m.w_is_discrete()) {
            const auto [wmax, pmax] = dominant_atom(m.discrete_w());
            (void)pmax;
            return m.log_base() == LogBase::Base2 ? wmax <= 2.0 : wmax <= 1.0;
        }
        return m.w_lognormal_s2() == 0.0;
    case Family::StableSub:
        // zeta(q) = (1 - sigma^alpha) q + sigma^alpha q^alpha is nondecreasing
        // when sigma^alpha <= 1.
        return std::pow(m.sigma(), m.alpha()) <= 1.0;
    case Family::StableSuper:
        return false;
    }
    return false;
}

} // namespace

CriticalExponents critical_exponents(const ScalingModel& model, double chi) {
    if (!(chi >= 0.0))
        throw DomainError("critical_exponents: chi must be >= 0");
    const double dpsi1 = psi_prime(model, 1.0);
    if (dpsi1 >= 1.0)
        throw ModelUnusable("critical_exponents: psi'(1) = " + std::to_string(dpsi1) +
                            " >= 1; q_max = 1 and the model is unusable for estimation");

    CriticalExponents ce;
    ce.chi = chi;
    const double inf = std::numeric_limits<double>::infinity();

    // q_max: zeta(q) = 1 on (1, inf). zeta is concave with zeta(1)=1 and
    // zeta'(1) > 0, so it dips below 1 at most once.
    auto zeta_f = [&](double q) { return zeta(model, q); };
    bool qmax_infinite = zeta_stays_above_one(model);
    if (!qmax_infinite) {
        double hi = 2.0;
        while (zeta_f(hi) >= 1.0) {
            hi *= 2.0;
            if (hi > kBracketCap) {
                std::cerr << "mfrac: warning: q_max bracket exceeded " << kBracketCap
                          << "; declaring q_max = +inf for " << model.describe() << "\n";
                qmax_infinite = true;
                break;
            }
        }
        if (!qmax_infinite) {
            // zeta decreasing past its maximum; bisect on -zeta.
            ce.q_max = bisect_increasing([&](double q) { return -zeta_f(q); }, hi / 2.0, hi, -1.0);
        }
    }
    if (qmax_infinite)
        ce.q_max = inf;

    // q_0 / q_chi: g(q) = q psi'(q) - psi(q) is increasing; g(1) = psi'(1) < 1.
    // Moment overflow at huge q means the slack diverged (natural-convention
    // families), so it counts as crossing any finite target.
    auto g = [&](double q) {
        const double v = q * psi_prime(model, q) - psi(model, q);
        return std::isfinite(v) ? v : inf;
    };
    const double g_sup = slack_supremum(model);
    auto solve_g = [&](double target) -> double {
        if (target >= g_sup)
            return inf; // the defining inequality holds for every finite q
        double hi = 2.0;
        while (g(hi) <= target) {
            hi *= 2.0;
            if (hi > kBracketCap)
                return inf;
        }
        return bisect_increasing(g, 1.0, hi, target);
    };
    ce.q_0 = solve_g(1.0);
    ce.q_chi = solve_g(1.0 + chi);

    if (!(ce.q_0 > 1.0))
        throw Error("critical_exponents: internal inconsistency, q_0 <= 1");
    if (chi > 0.0 && !(ce.q_chi > ce.q_0) && std::isfinite(ce.q_0))
        throw Error("critical_exponents: internal inconsistency, q_chi <= q_0");
    return ce;
}

double moment_gap(const ScalingModel& model, double p, double q) {
    if (!(p > 1.0))
        throw DomainError("moment_gap: p must be > 1");
    if (!model.q_in_domain(p * q))
        throw DomainError("moment_gap: p*q outside finiteness domain");
    return psi(model, p * q) - p * psi(model, q);
}

} // namespace mfrac
