#include "mfrac/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfrac/mrm.hpp"
#include "mfrac/rng.hpp"
#include "mfrac/stats.hpp"

namespace mfrac {

namespace {

// Pairwise sum of a power-of-two-length buffer (destroys it). The halving
// tree matches the dyadic aggregation tree, so for q = 1 the same row value
// is reproduced bit-for-bit at every level of a measure.
double pairwise_sum_pow2(std::vector<double>& buf, long count) {
    while (count > 1) {
        count /= 2;
        for (long i = 0; i < count; ++i)
            buf[i] = buf[2 * i] + buf[2 * i + 1];
    }
    return buf[0];
}

} // namespace

double StructureTable::at(int level, double q) const {
    const auto lit = std::find(levels.begin(), levels.end(), level);
    if (lit == levels.end())
        throw Error("structure table: level " + std::to_string(level) + " not present");
    const auto qit = std::find(q_list.begin(), q_list.end(), q);
    if (qit == q_list.end())
        throw Error("structure table: q not present");
    const std::size_t li = lit - levels.begin();
    const std::size_t qi = qit - q_list.begin();
    return S[li * q_list.size() + qi];
}

bool StructureTable::has_level(int level) const {
    return std::find(levels.begin(), levels.end(), level) != levels.end();
}

StructureTable structure_function(const Realization& r, const std::vector<double>& q_list,
                                  const std::vector<int>& levels) {
    if (q_list.empty() || levels.empty())
        throw Error("structure_function: empty q list or level list");
    for (double q : q_list)
        if (!(q >= 0.0) || !std::isfinite(q))
            throw DomainError("structure_function: q must be finite and >= 0");
    StructureTable t;
    t.q_list = q_list;
    t.levels = levels;
    std::sort(t.levels.begin(), t.levels.end());
    t.levels.erase(std::unique(t.levels.begin(), t.levels.end()), t.levels.end());
    if (t.levels.front() < 0 || t.levels.back() > r.level)
        throw Error("structure_function: levels must lie in [0, realization level]");
    t.L = r.grid.L;
    t.chi = r.grid.chi;
    t.n = r.grid.n;
    t.S.assign(t.levels.size() * q_list.size(), 0.0);

    Realization cur = r;
    std::vector<double> scratch;
    for (auto lit = t.levels.rbegin(); lit != t.levels.rend(); ++lit) {
        cur = aggregate(cur, cur.level - *lit);
        const std::size_t row = (lit.base() - t.levels.begin() - 1) * q_list.size();
        const long npb = cur.per_block();
        for (std::size_t qi = 0; qi < q_list.size(); ++qi) {
            const double q = q_list[qi];
            double total = 0.0;
            for (long j = 0; j < t.L; ++j) {
                scratch.resize(npb);
                const double* src = cur.values.data() + j * npb;
                for (long k = 0; k < npb; ++k)
                    scratch[k] = power_q(src[k], q);
                total += pairwise_sum_pow2(scratch, npb);
            }
            t.S[row + qi] = total;
        }
    }
    return t;
}

double zeta_tilde(const StructureTable& t, int level, double q) {
    const double s0 = t.at(level, q);
    const double s1 = t.at(level + 1, q);
    if (!(s0 > 0.0) || !(s1 > 0.0))
        throw DegenerateSample("zeta_tilde: structure function vanished");
    return 1.0 + std::log2(s0 / s1);
}

double zeta_hat(const StructureTable& t, int level, double q) {
    if (level < 1)
        throw Error("zeta_hat: level must be >= 1");
    const double s = t.at(level, q);
    if (!(s > 0.0))
        throw DegenerateSample("zeta_hat: structure function vanished");
    const double m = static_cast<double>(level);
    return 1.0 + std::log2(static_cast<double>(t.L)) / m - std::log2(s) / m;
}

Process process_from_string(const std::string& s) {
    if (s == "cascade")
        return Process::Cascade;
    if (s == "mrm")
        return Process::Mrm;
    if (s == "mrw_half" || s == "mrw-half")
        return Process::MrwHalf;
    if (s == "mrw_h" || s == "mrw-h" || s == "mrw")
        return Process::MrwH;
    throw ParseError("unknown process: " + s);
}

std::string process_to_string(Process p) {
    switch (p) {
    case Process::Cascade:
        return "cascade";
    case Process::Mrm:
        return "mrm";
    case Process::MrwHalf:
        return "mrw_half";
    case Process::MrwH:
        return "mrw_h";
    }
    return "?";
}

double asymptotic_rate(const ScalingModel& model, Process process, double q, double chi) {
    const CriticalExponents ce = critical_exponents(model, chi);
    auto reject = [&](double lhs, const char* what) {
        std::ostringstream os;
        os << "asymptotic_rate: " << what << " violated: " << lhs << " >= q_chi = " << ce.q_chi;
        throw ConditionViolated(os.str());
    };
    switch (process) {
    case Process::Cascade:
        if (!(2.0 * q < ce.q_chi))
            reject(2.0 * q, "cascade CLT condition 2q < q_chi");
        break;
    case Process::Mrm:
        if (!(4.0 * q < ce.q_chi))
            reject(4.0 * q, "MRM CLT condition 4q < q_chi");
        break;
    case Process::MrwHalf:
        if (!(q < ce.q_chi))
            reject(q, "MRW (H=1/2) CLT condition q < q_chi");
        break;
    case Process::MrwH:
        if (!(4.0 * q < ce.q_chi))
            reject(4.0 * q, "MRW (H>1/2) CLT condition 4q < q_chi");
        break;
    }
    if (process == Process::MrwHalf)
        return chi / 2.0 + psi(model, q / 2.0) - psi(model, q) / 2.0 + 0.5;
    return (1.0 + chi + 2.0 * psi(model, q) - psi(model, 2.0 * q)) / 2.0;
}

namespace {

struct CurveData {
    std::vector<int> levels;
    std::vector<double> q_list;
    long units = 0;
    // contribution[u][level][q]
    std::vector<double> contrib;
    double at(long u, std::size_t li, std::size_t qi, std::size_t nl, std::size_t nq) const {
        return contrib[(u * nl + li) * nq + qi];
    }
};

double curve_estimate(const std::vector<double>& S_rows, const std::vector<int>& levels,
                      std::size_t nq, std::size_t qi, CurveMethod method) {
    if (method == CurveMethod::Ratio) {
        double acc = 0.0;
        long cnt = 0;
        for (std::size_t li = 0; li + 1 < levels.size(); ++li) {
            const double s0 = S_rows[li * nq + qi];
            const double s1 = S_rows[(li + 1) * nq + qi];
            if (!(s0 > 0.0) || !(s1 > 0.0))
                throw DegenerateSample("zeta_curve: structure function vanished");
            acc += 1.0 + std::log2(s0 / s1);
            ++cnt;
        }
        return acc / static_cast<double>(cnt);
    }
    std::vector<double> xs(levels.size()), ys(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double s = S_rows[li * nq + qi];
        if (!(s > 0.0))
            throw DegenerateSample("zeta_curve: structure function vanished");
        xs[li] = static_cast<double>(levels[li]);
        ys[li] = std::log2(s);
    }
    return 1.0 - fit_line(xs, ys).slope;
}

} // namespace

EstimateReport zeta_curve(const Realization& r, const std::vector<double>& q_list, int level_lo,
                          int level_hi, CurveMethod method, long bootstrap, std::uint64_t seed) {
    if (level_lo < 0 || level_hi > r.level || level_lo >= level_hi)
        throw Error("zeta_curve: need 0 <= level_lo < level_hi <= realization level");
    if (method == CurveMethod::Ratio && level_hi - level_lo < 1)
        throw Error("zeta_curve: ratio method needs at least one level pair");

    CurveData d;
    d.q_list = q_list;
    for (int m = level_lo; m <= level_hi; ++m)
        d.levels.push_back(m);
    const std::size_t nl = d.levels.size();
    const std::size_t nq = q_list.size();

    // Resampling unit: blocks when there are several; otherwise the coarsest
    // dyadic chunks of the single block (keeps within-chunk dependence).
    const bool by_block = r.grid.L >= 2;
    d.units = by_block ? r.grid.L : (1L << level_lo);
    d.contrib.assign(d.units * nl * nq, 0.0);

    Realization cur = r;
    std::vector<double> scratch;
    for (std::size_t li = nl; li-- > 0;) {
        cur = aggregate(cur, cur.level - d.levels[li]);
        const long npb = cur.per_block();
        const long per_unit = by_block ? npb : npb / d.units;
        for (long u = 0; u < d.units; ++u) {
            const double* src = cur.values.data() + u * per_unit;
            for (std::size_t qi = 0; qi < nq; ++qi) {
                scratch.resize(per_unit);
                for (long k = 0; k < per_unit; ++k)
                    scratch[k] = power_q(src[k], q_list[qi]);
                d.contrib[(u * nl + li) * nq + qi] = pairwise_sum_pow2(scratch, per_unit);
            }
        }
    }

    EstimateReport rep;
    rep.q_list = q_list;
    rep.method = method == CurveMethod::Ratio ? "ratio" : "regression";
    rep.level_lo = level_lo;
    rep.level_hi = level_hi;
    rep.bootstrap = bootstrap;
    rep.rate_exponent.assign(nq, std::numeric_limits<double>::quiet_NaN());

    std::vector<double> S_rows(nl * nq, 0.0);
    for (long u = 0; u < d.units; ++u)
        for (std::size_t i = 0; i < nl * nq; ++i)
            S_rows[i] += d.contrib[u * nl * nq + i];

    // zeta_hat at the finest requested level, for comparison output.
    StructureTable t;
    t.q_list = q_list;
    t.levels = d.levels;
    t.S = S_rows;
    t.L = r.grid.L;
    t.chi = r.grid.chi;
    t.n = r.grid.n;

    rep.zeta_tilde.resize(nq);
    rep.zeta_hat.resize(nq);
    rep.std_error.assign(nq, 0.0);
    for (std::size_t qi = 0; qi < nq; ++qi) {
        rep.zeta_tilde[qi] = curve_estimate(S_rows, d.levels, nq, qi, method);
        rep.zeta_hat[qi] = level_hi >= 1 ? zeta_hat(t, level_hi, q_list[qi])
                                         : std::numeric_limits<double>::quiet_NaN();
    }

    if (bootstrap > 1) {
        std::vector<double> boot(nq, 0.0), boot2(nq, 0.0);
        std::vector<double> S_boot(nl * nq);
        for (long b = 0; b < bootstrap; ++b) {
            RngStream rng(seed, {static_cast<std::uint64_t>(b), purpose::bootstrap});
            std::fill(S_boot.begin(), S_boot.end(), 0.0);
            for (long u = 0; u < d.units; ++u) {
                const long pick = static_cast<long>(rng.uniform01() * d.units);
                const long uu = std::min(pick, d.units - 1);
                for (std::size_t i = 0; i < nl * nq; ++i)
                    S_boot[i] += d.contrib[uu * nl * nq + i];
            }
            for (std::size_t qi = 0; qi < nq; ++qi) {
                const double est = curve_estimate(S_boot, d.levels, nq, qi, method);
                boot[qi] += est;
                boot2[qi] += est * est;
            }
        }
        for (std::size_t qi = 0; qi < nq; ++qi) {
            const double m = boot[qi] / static_cast<double>(bootstrap);
            const double v = boot2[qi] / static_cast<double>(bootstrap) - m * m;
            rep.std_error[qi] = v > 0.0 ? std::sqrt(v) : 0.0;
        }
    }
    return rep;
}

} // namespace mfrac
