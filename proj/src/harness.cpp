#include "mfrac/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfrac/cascade.hpp"
#include "mfrac/mrm.hpp"
#include "mfrac/mrw.hpp"
#include "mfrac/parallel.hpp"
#include "mfrac/rng.hpp"

namespace mfrac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double truth_zeta(const Experiment& exp, double q) {
    switch (exp.process) {
    case Process::Cascade:
    case Process::Mrm:
        return zeta(exp.model, q);
    case Process::MrwHalf:
        return zeta(exp.model, q / 2.0);
    case Process::MrwH:
        return zeta_h(exp.model, exp.H, q);
    }
    return kNaN;
}

Realization sample_for(const Experiment& exp, const MixedGrid& grid, int level,
                       std::uint64_t rep_tag) {
    switch (exp.process) {
    case Process::Cascade:
        return sample_cascade(exp.model, grid, exp.depth_extra, exp.seed, level, 1, rep_tag).data;
    case Process::Mrm:
        return sample_mrm(exp.model, grid, exp.oversample, exp.seed, level, 1, rep_tag).data;
    case Process::MrwHalf:
        return sample_mrw(exp.model, 0.5, grid, exp.oversample, exp.seed, level, 1, rep_tag).data;
    case Process::MrwH:
        return sample_mrw(exp.model, exp.H, grid, exp.oversample, exp.seed, level, 1, rep_tag)
            .data;
    }
    throw Error("unreachable");
}

} // namespace

std::vector<std::string> validate_experiment(const Experiment& exp) {
    std::vector<std::string> bad;
    auto fail = [&](const std::string& s) { bad.push_back(s); };

    try {
        MixedGrid::make(exp.T, exp.n, exp.chi);
    } catch (const Error& e) {
        fail(e.what());
    }
    if (exp.R < 1)
        fail("R must be >= 1");
    if (exp.q_list.empty())
        fail("q list is empty");

    if (exp.process == Process::Cascade) {
        if (!exp.model.has_weight_law())
            fail("cascade: model has no weight law: " + exp.model.describe());
        else if (exp.model.log_base() != LogBase::Base2)
            fail("cascade: model must use the base-2 convention");
        else {
            const double wlw = exp.model.weight_moment_dq(1.0) / std::log(2.0);
            if (wlw >= 1.0)
                fail("cascade: E[W log2 W] = " + std::to_string(wlw) + " >= 1");
        }
    } else {
        if (exp.model.log_base() != LogBase::Natural)
            fail(process_to_string(exp.process) + ": model must use the natural-log convention");
    }
    if (exp.process == Process::MrwH) {
        if (!(exp.H > 0.5 && exp.H < 0.75))
            fail("MRW (H>1/2) verification requires 1/2 < H < 3/4, got H = " +
                 std::to_string(exp.H));
        else {
            const double slack = exp.H - psi(exp.model, 2.0) / 2.0;
            if (!(slack > 0.5))
                fail("MRW validity gate H - psi(2)/2 > 1/2 violated: " + std::to_string(slack));
        }
    }

    if (exp.gate != Gate::None && bad.empty()) {
        for (double q : exp.q_list) {
            try {
                if (exp.gate == Gate::Clt) {
                    asymptotic_rate(exp.model, exp.process, q, exp.chi);
                } else {
                    const CriticalExponents ce = critical_exponents(exp.model, exp.chi);
                    if (!(q < ce.q_chi)) {
                        std::ostringstream os;
                        os << "consistency requires q < q_chi: q = " << q
                           << " >= q_chi = " << ce.q_chi;
                        fail(os.str());
                    }
                }
            } catch (const Error& e) {
                fail(e.what());
            }
        }
    }
    return bad;
}

Summary summarize(std::span<const double> samples, double truth) {
    if (samples.empty())
        throw Error("summarize: no samples");
    Summary s;
    s.mean = mean_of(samples);
    s.bias = s.mean - truth;
    s.variance = variance_of(samples);
    s.sd = std::sqrt(s.variance);
    s.standardized.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        s.standardized[i] = s.sd > 0.0 ? (samples[i] - s.mean) / s.sd : 0.0;
    if (samples.size() >= 50 && s.sd > 0.0) {
        const KsResult ks = ks_normal_test(s.standardized);
        s.ks_stat = ks.statistic;
        s.ks_pvalue = ks.p_value;
    } else {
        s.ks_stat = kNaN;
        s.ks_pvalue = kNaN;
    }
    return s;
}

McReport run_replications(const Experiment& exp, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto bad = validate_experiment(exp);
    if (!bad.empty()) {
        std::string msg = "experiment rejected:";
        for (const auto& b : bad)
            msg += "\n  " + b;
        throw ValidationError(msg);
    }

    const MixedGrid grid = MixedGrid::make(exp.T, exp.n, exp.chi);
    const std::size_t nq = exp.q_list.size();

    McReport rep;
    rep.process = exp.process;
    rep.model = exp.model.describe();
    rep.H = exp.H;
    rep.n = exp.n;
    rep.chi = exp.chi;
    rep.L = grid.L;
    rep.R = exp.R;
    rep.seed = exp.seed;
    rep.q_list = exp.q_list;
    rep.truth.resize(nq);
    rep.rate_exponent.assign(nq, kNaN);
    for (std::size_t qi = 0; qi < nq; ++qi) {
        rep.truth[qi] = truth_zeta(exp, exp.q_list[qi]);
        if (exp.gate == Gate::Clt)
            rep.rate_exponent[qi] =
                asymptotic_rate(exp.model, exp.process, exp.q_list[qi], exp.chi);
    }
    rep.tilde.assign(nq, std::vector<double>(exp.R));
    rep.hat.assign(nq, std::vector<double>(exp.R));

    const std::vector<int> levels{exp.n, exp.n + 1};
    parallel_for(exp.R, threads, [&](long r) {
        try {
            const Realization real =
                sample_for(exp, grid, exp.n + 1, static_cast<std::uint64_t>(r) + 1);
            const StructureTable table = structure_function(real, exp.q_list, levels);
            for (std::size_t qi = 0; qi < nq; ++qi) {
                rep.tilde[qi][r] = zeta_tilde(table, exp.n, exp.q_list[qi]);
                rep.hat[qi][r] = zeta_hat(table, exp.n, exp.q_list[qi]);
            }
        } catch (const Error& e) {
            throw Error("replication " + std::to_string(r) + ": " + e.what());
        }
    });

    rep.tilde_summary.reserve(nq);
    rep.hat_summary.reserve(nq);
    for (std::size_t qi = 0; qi < nq; ++qi) {
        rep.tilde_summary.push_back(summarize(rep.tilde[qi], rep.truth[qi]));
        rep.hat_summary.push_back(summarize(rep.hat[qi], rep.truth[qi]));
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

double rate_regression(const std::vector<int>& n_list, const std::vector<double>& variances) {
    if (n_list.size() != variances.size() || n_list.size() < 4)
        throw Error("rate_regression: need >= 4 levels");
    std::vector<double> xs(n_list.size()), ys(n_list.size());
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (!(variances[i] > 0.0))
            throw DegenerateSample("rate_regression: nonpositive variance");
        xs[i] = static_cast<double>(n_list[i]);
        ys[i] = std::log2(variances[i]);
    }
    return fit_line(xs, ys).slope;
}

McReport rate_experiment(const Experiment& exp, const std::vector<int>& n_list, int threads) {
    if (n_list.size() < 4)
        throw Error("rate_experiment: need at least 4 levels");
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t nq = exp.q_list.size();

    McReport out;
    out.process = exp.process;
    out.model = exp.model.describe();
    out.H = exp.H;
    out.chi = exp.chi;
    out.R = exp.R;
    out.seed = exp.seed;
    out.q_list = exp.q_list;
    out.n_list = n_list;
    out.var_by_n.assign(nq, std::vector<double>(n_list.size()));
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        Experiment sub = exp;
        sub.n = n_list[ni];
        sub.seed = splitmix64(exp.seed ^ static_cast<std::uint64_t>(n_list[ni]));
        const McReport r = run_replications(sub, threads);
        if (ni == 0) {
            out.truth = r.truth;
            out.rate_exponent = r.rate_exponent;
        }
        for (std::size_t qi = 0; qi < nq; ++qi)
            out.var_by_n[qi][ni] = r.tilde_summary[qi].variance;
    }
    out.rate_slope.resize(nq);
    out.rate_theory.resize(nq);
    for (std::size_t qi = 0; qi < nq; ++qi) {
        out.rate_slope[qi] = rate_regression(n_list, out.var_by_n[qi]);
        out.rate_theory[qi] = -2.0 * asymptotic_rate(exp.model, exp.process, exp.q_list[qi],
                                                     exp.chi);
    }
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

CovarianceDecay covariance_decay(const ScalingModel& model, DecayKind kind, double q, int n,
                                 const std::vector<long>& k_list, long R, std::uint64_t seed,
                                 int oversample, double H, int threads) {
    if (k_list.empty())
        throw Error("covariance_decay: empty k list");
    for (long k : k_list)
        if (k < 1 || k > (1L << (n - 1)))
            throw Error("covariance_decay: k must lie in [1, 2^(n-1)]");
    const CriticalExponents ce = critical_exponents(model, 0.0);
    if (!(2.0 * q < ce.q_max)) {
        std::ostringstream os;
        os << "covariance_decay requires 2q < q_max: 2q = " << 2.0 * q
           << " >= q_max = " << ce.q_max;
        throw ConditionViolated(os.str());
    }

    const MixedGrid grid = MixedGrid::make(1.0, n, 0.0); // single block
    const long nk = static_cast<long>(k_list.size());
    const long cells = 1L << n;

    // Per-replication translation-averaged products, accumulated per gap.
    std::vector<std::vector<double>> per_rep(R, std::vector<double>(nk, 0.0));
    const double tau_exp = (kind == DecayKind::Mrm) ? zeta(model, q) - 1.0
                                                    : zeta_h(model, H, q) - 1.0;
    const double two_tau = std::exp2(tau_exp);
    const double norm = (kind == DecayKind::Mrm)
                            ? std::exp2(static_cast<double>(n) * zeta(model, 2.0 * q))
                            : std::exp2(static_cast<double>(n) * zeta_h(model, H, 2.0 * q));

    parallel_for(R, threads, [&](long r) {
        const MrmRealization mrm =
            sample_mrm(model, grid, oversample, seed, n + 1, 1, static_cast<std::uint64_t>(r) + 1);
        std::vector<double> D(cells);
        if (kind == DecayKind::Mrm) {
            const Realization coarse = aggregate(mrm.data, 1);
            for (long k = 0; k < cells; ++k)
                D[k] = power_q(coarse.values[k], q) -
                       two_tau * (power_q(mrm.data.values[2 * k], q) +
                                  power_q(mrm.data.values[2 * k + 1], q));
        } else {
            for (long k = 0; k < cells; ++k) {
                const double a0 = conditional_sigma(mrm, H, 0, k, n);
                const double a1 = conditional_sigma(mrm, H, 0, 2 * k, n + 1);
                const double a2 = conditional_sigma(mrm, H, 0, 2 * k + 1, n + 1);
                D[k] = two_tau * (power_q(a1, q) + power_q(a2, q)) - power_q(a0, q);
            }
        }
        for (long ki = 0; ki < nk; ++ki) {
            const long gap = k_list[ki];
            double acc = 0.0;
            for (long k0 = 0; k0 + gap < cells; ++k0)
                acc += D[k0] * D[k0 + gap];
            per_rep[r][ki] = acc / static_cast<double>(cells - gap);
        }
    });

    CovarianceDecay out;
    out.k_list = k_list;
    out.R = R;
    out.cov.assign(nk, 0.0);
    for (long r = 0; r < R; ++r)
        for (long ki = 0; ki < nk; ++ki)
            out.cov[ki] += per_rep[r][ki];
    for (long ki = 0; ki < nk; ++ki)
        out.cov[ki] = norm * out.cov[ki] / static_cast<double>(R);
    out.theory_bound = -(psi(model, 2.0 * q) - 2.0 * psi(model, q) + 1.0);

    double scale = 0.0;
    for (double c : out.cov)
        scale = std::max(scale, std::abs(c));
    if (scale < 1e-14) {
        out.degenerate = true;
        out.fitted_exponent = -std::numeric_limits<double>::infinity();
        return out;
    }
    std::vector<double> xs, ys;
    for (long ki = 0; ki < nk; ++ki) {
        if (std::abs(out.cov[ki]) > 0.0) {
            xs.push_back(std::log(static_cast<double>(k_list[ki])));
            ys.push_back(std::log(std::abs(out.cov[ki])));
        }
    }
    out.fitted_exponent = fit_line(xs, ys).slope;
    return out;
}

} // namespace mfrac
