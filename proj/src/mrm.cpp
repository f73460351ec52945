#include "mfrac/mrm.hpp"

#include <cmath>

#include "mfrac/cascade.hpp"
#include "mfrac/parallel.hpp"

namespace mfrac {

namespace {

constexpr long kCholeskyCap = 1L << 13;

bool is_pow2(long x) { return x > 0 && (x & (x - 1)) == 0; }

std::uint64_t field_purpose(const ScalingModel& model) {
    switch (model.family()) {
    case Family::PoissonCascade:
        return purpose::poisson_points;
    case Family::StableSub:
    case Family::StableSuper:
        return purpose::stable_cells;
    default:
        return purpose::gauss_field;
    }
}

} // namespace

ConeGeometry::ConeGeometry(double T_, double l_) : T(T_), l(l_) {
    if (!(T > 0.0))
        throw DomainError("cone: T must be > 0");
    if (!(l > 0.0 && l < T))
        throw DomainError("cone: need 0 < l < T");
}

double ConeGeometry::mu() const { return 1.0 + std::log(T / l); }

double cone_overlap(double T, double l, double tau) {
    if (!(T > 0.0) || !(l > 0.0 && l < T))
        throw DomainError("cone_overlap: need 0 < l < T");
    tau = std::abs(tau);
    if (tau >= T)
        return 0.0;
    if (tau <= l)
        return std::log(T / l) + 1.0 - tau / l;
    return std::log(T / tau);
}

std::vector<ConePoint> sample_cone_points(const ScalingModel& model, const ConeGeometry& geom,
                                          double s_lo, double s_hi, RngStream& rng) {
    if (model.family() != Family::PoissonCascade)
        throw InvalidModel("cone points: compound-Poisson family required");
    if (!(s_hi > s_lo))
        throw DomainError("cone points: empty window");
    // Intensity t^-2 ds dt over {t > l}: total mass (s_hi - s_lo)/l.
    const double total = (s_hi - s_lo) / geom.l;
    const long count = rng.poisson(total);
    std::vector<ConePoint> pts(count);
    for (auto& p : pts) {
        p.s = rng.uniform(s_lo, s_hi);
        p.t = geom.l / rng.uniform01();
        p.log_w = std::log(draw_weight(model, rng));
    }
    return pts;
}

WlPlan::WlPlan(const ScalingModel& model, const ConeGeometry& geom, long mesh_count)
    : model_(model), geom_(geom), mesh_(mesh_count) {
    if (model.log_base() != LogBase::Natural)
        throw InvalidModel("w_l field: model must use the natural-log convention");
    if (!is_pow2(mesh_count))
        throw Error("w_l field: mesh size must be a power of two");
    h_ = geom.T / static_cast<double>(mesh_);

    switch (model_.family()) {
    case Family::LogNormal: {
        const double lambda2 = model_.lambda2();
        gauss_mean_ = -0.5 * lambda2 * geom.mu();
        std::vector<double> cov_half(mesh_ + 1);
        for (long k = 0; k <= mesh_; ++k)
            cov_half[k] = lambda2 * cone_overlap(geom.T, geom.l, k * h_);
        try {
            circulant_ = std::make_shared<CirculantSampler>(std::move(cov_half));
        } catch (const EmbeddingFailure&) {
            if (mesh_ > kCholeskyCap)
                throw EmbeddingFailure(
                    "w_l field: circulant embedding failed and mesh exceeds the dense "
                    "fallback cap (2^13); lower the oversample factor");
            // Dense lower-triangular factor with diagonal jitter.
            const long n = mesh_;
            chol_.assign(n, {});
            std::vector<std::vector<double>>& Lm = chol_;
            for (long i = 0; i < n; ++i) {
                Lm[i].resize(i + 1);
                for (long j = 0; j <= i; ++j) {
                    double s = lambda2 * cone_overlap(geom.T, geom.l, (i - j) * h_);
                    if (i == j)
                        s += 1e-12;
                    for (long k = 0; k < j; ++k)
                        s -= Lm[i][k] * Lm[j][k];
                    if (i == j) {
                        if (s <= 0.0)
                            throw EmbeddingFailure("w_l field: covariance not positive definite");
                        Lm[i][i] = std::sqrt(s);
                    } else {
                        Lm[i][j] = s / Lm[j][j];
                    }
                }
            }
        }
        break;
    }
    case Family::PoissonCascade:
        break; // point process, nothing to precompute
    case Family::StableSub:
    case Family::StableSuper: {
        const double ratio = geom.T / geom.l;
        const double layers_f = std::log2(ratio);
        const long nlayers = std::lround(layers_f);
        if (std::abs(layers_f - static_cast<double>(nlayers)) > 1e-9)
            throw Error("w_l field: stable cell construction needs T/l to be a power of two");
        layers_.resize(nlayers + 1);
        for (long jl = 0; jl < nlayers; ++jl) {
            const double t_lo = geom.l * std::exp2(static_cast<double>(jl));
            const double t_hi = geom.l * std::exp2(static_cast<double>(jl + 1));
            const double t_mid = std::sqrt(t_lo * t_hi);
            const double width = std::min(t_mid, geom.T);
            layers_[jl].cell_mu = h_ * (1.0 / t_lo - 1.0 / t_hi);
            layers_[jl].radius = static_cast<long>(std::floor(width / (2.0 * h_) - 1e-12));
        }
        // Tail cell t > T: cross-section width is exactly T there.
        layers_[nlayers].cell_mu = h_ / geom.T;
        layers_[nlayers].radius = static_cast<long>(std::floor(geom.T / (2.0 * h_) - 1e-12));
        long rmax = 0;
        for (const auto& layer : layers_)
            rmax = std::max(rmax, layer.radius);
        cell_lo_ = -rmax - 1;
        cell_hi_ = mesh_ - 1 + rmax + 1;
        break;
    }
    }
}

void WlPlan::sample_gaussian(RngStream& rng, std::vector<double>& out) const {
    if (circulant_) {
        circulant_->sample(rng, out, mesh_);
    } else {
        std::vector<double> z(mesh_);
        rng.fill_normal(z);
        out.assign(mesh_, 0.0);
        for (long i = 0; i < mesh_; ++i) {
            double s = 0.0;
            for (long j = 0; j <= i; ++j)
                s += chol_[i][j] * z[j];
            out[i] = s;
        }
    }
    for (double& v : out)
        v += gauss_mean_;
}

void WlPlan::sample_poisson(RngStream& rng, std::vector<double>& out) const {
    const double T = geom_.T;
    const auto pts = sample_cone_points(model_, geom_, -T / 2.0, T + T / 2.0, rng);
    // Each point marks the mesh interval its cone covers; accumulate with a
    // difference array and prefix-sum.
    std::vector<double> diff(mesh_ + 1, 0.0);
    for (const auto& p : pts) {
        const double hw = std::min(p.t, T) / 2.0;
        long lo = static_cast<long>(std::ceil((p.s - hw) / h_ - 0.5));
        long hi = static_cast<long>(std::floor((p.s + hw) / h_ - 0.5));
        lo = std::max(lo, 0L);
        hi = std::min(hi, mesh_ - 1);
        if (lo > hi)
            continue;
        diff[lo] += p.log_w;
        diff[hi + 1] -= p.log_w;
    }
    out.assign(mesh_, 0.0);
    double acc = 0.0;
    for (long i = 0; i < mesh_; ++i) {
        acc += diff[i];
        out[i] = acc;
    }
}

void WlPlan::sample_stable(RngStream& rng, std::vector<double>& out) const {
    const double alpha = model_.alpha();
    const double sig_a = std::pow(model_.sigma(), alpha);
    const bool sub = model_.family() == Family::StableSub;
    const double cos_term = std::abs(std::cos(M_PI * alpha / 2.0));
    const long ncells = cell_hi_ - cell_lo_ + 1;

    out.assign(mesh_, 0.0);
    std::vector<double> prefix(ncells + 1);
    for (const auto& layer : layers_) {
        const double mu_c = layer.cell_mu;
        const double drift = sig_a * mu_c;
        prefix[0] = 0.0;
        for (long m = 0; m < ncells; ++m) {
            double x;
            if (sub) {
                // psi(q) mu = sigma^a mu (q - q^a): drift minus a positive stable part
                x = drift - model_.sigma() * std::pow(mu_c, 1.0 / alpha) * rng.stable_positive(alpha);
            } else {
                // psi(q) mu = sigma^a mu (q^a - q): left-skewed stable minus drift
                x = model_.sigma() * std::pow(mu_c * cos_term, 1.0 / alpha) *
                        rng.stable_standard(alpha, -1.0) -
                    drift;
            }
            prefix[m + 1] = prefix[m] + x;
        }
        const long r = layer.radius;
        for (long i = 0; i < mesh_; ++i) {
            const long a = i - r - cell_lo_;     // first cell in window
            const long b = i + r - cell_lo_ + 1; // one past last
            out[i] += prefix[b] - prefix[a];
        }
    }
}

void WlPlan::sample(RngStream& rng, std::vector<double>& out) const {
    switch (model_.family()) {
    case Family::LogNormal:
        sample_gaussian(rng, out);
        return;
    case Family::PoissonCascade:
        sample_poisson(rng, out);
        return;
    case Family::StableSub:
    case Family::StableSuper:
        sample_stable(rng, out);
        return;
    }
}

std::vector<double> sample_wl(const ScalingModel& model, const ConeGeometry& geom,
                              long mesh_count, RngStream& rng) {
    WlPlan plan(model, geom, mesh_count);
    std::vector<double> out;
    plan.sample(rng, out);
    return out;
}

MrmRealization sample_mrm(const ScalingModel& model, const MixedGrid& grid, int oversample,
                          std::uint64_t seed, int level, int threads, std::uint64_t rep_tag) {
    if (oversample < 0)
        throw Error("sample_mrm: oversample must be >= 0");
    if (level < 0)
        level = grid.n;
    const long fine = 1L << (level + oversample);
    const double h = grid.T / static_cast<double>(fine);
    const ConeGeometry geom(grid.T, h); // cutoff tied to the fine mesh
    const WlPlan plan(model, geom, fine);
    const std::uint64_t tag = field_purpose(model);

    MrmRealization out;
    out.data.grid = grid;
    out.data.level = level;
    out.data.kind = SeriesKind::Measure;
    out.data.seed = seed;
    out.oversample = oversample;
    out.cutoff_l = h;
    out.mesh_h = h;
    const long npb = 1L << level;
    out.data.values.resize(grid.L * npb);
    out.field.resize(grid.L * fine);

    parallel_for(grid.L, threads, [&](long j) {
        RngStream rng(seed, {rep_tag, static_cast<std::uint64_t>(j), tag});
        std::vector<double> w;
        plan.sample(rng, w);
        double* fdst = out.field.data() + j * fine;
        double* mdst = out.data.values.data() + j * npb;
        const long group = 1L << oversample;
        for (long i = 0; i < fine; ++i)
            fdst[i] = w[i];
        for (long k = 0; k < npb; ++k) {
            double s = 0.0;
            for (long i = 0; i < group; ++i)
                s += std::exp(w[k * group + i]) * h;
            mdst[k] = s;
        }
    });
    return out;
}

double power_q(double x, double q) {
    if (q == 0.0)
        return 1.0;
    const double a = std::abs(x);
    if (q == 1.0)
        return a;
    if (a < 1e-300)
        return 0.0;
    return std::exp(q * std::log(a));
}

double empirical_moment(const Realization& r, double q) {
    if (!(q >= 0.0))
        throw DomainError("empirical_moment: q must be >= 0");
    double s = 0.0;
    for (double v : r.values)
        s += power_q(v, q);
    return s / static_cast<double>(r.values.size());
}

} // namespace mfrac
