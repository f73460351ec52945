#include "mfrac/mrw.hpp"

#include <cmath>

#include "mfrac/fft.hpp"
#include "mfrac/parallel.hpp"

namespace mfrac {

double fgn_autocovariance(double H, long k) {
    if (k == 0)
        return 1.0;
    const double kk = static_cast<double>(std::labs(k));
    return 0.5 * (std::pow(kk + 1.0, 2.0 * H) - 2.0 * std::pow(kk, 2.0 * H) +
                  std::pow(kk - 1.0, 2.0 * H));
}

namespace {

std::vector<double> fgn_cov_half(double H, long count) {
    if (!(H > 0.0 && H < 1.0))
        throw InvalidH("fgn: H must be in (0,1)");
    if (count < 1)
        throw Error("fgn: count must be >= 1");
    const std::size_t m = next_pow2(static_cast<std::size_t>(2 * count));
    std::vector<double> cov(m / 2 + 1);
    for (std::size_t k = 0; k < cov.size(); ++k)
        cov[k] = fgn_autocovariance(H, static_cast<long>(k));
    return cov;
}

} // namespace

FgnPlan::FgnPlan(double H, long count) : H_(H), count_(count), sampler_(fgn_cov_half(H, count)) {}

void FgnPlan::sample(RngStream& rng, std::vector<double>& out) const {
    sampler_.sample(rng, out, count_);
}

std::vector<double> sample_fgn(double H, long count, RngStream& rng) {
    if (!(H > 0.0 && H < 1.0))
        throw InvalidH("fgn: H must be in (0,1)");
    FgnPlan plan(H, count);
    std::vector<double> out;
    plan.sample(rng, out);
    return out;
}

MrwPath sample_mrw(const ScalingModel& model, double H, const MixedGrid& grid, int oversample,
                   std::uint64_t seed, int level, int threads, std::uint64_t rep_tag) {
    if (!(H >= 0.5 && H < 1.0))
        throw InvalidH("sample_mrw: H must be in [1/2, 1)");
    if (H > 0.5) {
        const double slack = H - psi(model, 2.0) / 2.0;
        if (!(slack > 0.5))
            throw ValidityError("sample_mrw: H - psi(2)/2 = " + std::to_string(slack) +
                                " <= 1/2; the H > 1/2 walk is not defined");
    }
    if (level < 0)
        level = grid.n;

    MrwPath out;
    out.H = H;
    out.mrm = sample_mrm(model, grid, oversample, seed, level, threads, rep_tag);
    out.data.grid = grid;
    out.data.level = level;
    out.data.kind = SeriesKind::Increments;
    out.data.seed = seed;
    const long npb = 1L << level;
    out.data.values.resize(grid.L * npb);

    if (H == 0.5) {
        parallel_for(grid.L, threads, [&](long j) {
            RngStream rng(seed, {rep_tag, static_cast<std::uint64_t>(j), purpose::noise});
            double* dst = out.data.values.data() + j * npb;
            const double* mass = out.mrm.data.values.data() + j * npb;
            for (long k = 0; k < npb; ++k)
                dst[k] = std::sqrt(mass[k]) * rng.normal();
        });
        return out;
    }

    const long fine = out.mrm.fine_per_block();
    const double h = out.mrm.mesh_h;
    const double hH = std::pow(h, H);
    const FgnPlan plan(H, fine);
    const long group = 1L << oversample;
    parallel_for(grid.L, threads, [&](long j) {
        RngStream rng(seed, {rep_tag, static_cast<std::uint64_t>(j), purpose::fgn});
        std::vector<double> g;
        plan.sample(rng, g);
        const double* w = out.mrm.field.data() + j * fine;
        double* dst = out.data.values.data() + j * npb;
        for (long k = 0; k < npb; ++k) {
            double s = 0.0;
            for (long i = k * group; i < (k + 1) * group; ++i)
                s += std::exp(w[i]) * hH * g[i];
            dst[k] = s;
        }
    });
    return out;
}

namespace {

struct FineWindow {
    const double* w = nullptr; // field values
    long begin = 0;
    long count = 0;
};

FineWindow fine_window(const MrmRealization& mrm, long j, long k, int at_level) {
    const int top = mrm.data.level + mrm.oversample;
    if (at_level < 0)
        at_level = mrm.data.level;
    if (at_level > top)
        throw Error("conditional sigma: level finer than the stored mesh");
    const long group = 1L << (top - at_level);
    const long fine = mrm.fine_per_block();
    if (j < 0 || j >= mrm.data.grid.L || k < 0 || (k + 1) * group > fine)
        throw Error("conditional sigma: cell out of range");
    return {mrm.field.data() + j * fine, k * group, group};
}

} // namespace

// C_H Int Int |u-v|^(2H-2) over two mesh cells at distance d cells equals
// h^2H * gamma(d) with gamma the fGn autocovariance (d = 0 is the exact
// in-cell square integral). Using the exact cell-pair integrals makes the
// Riemann form agree with the product construction's conditional variance.
double conditional_sigma(const MrmRealization& mrm, double H, long j, long k, int at_level) {
    if (!(H > 0.5 && H < 1.0))
        throw InvalidH("conditional_sigma: H must be in (1/2, 1)");
    const auto win = fine_window(mrm, j, k, at_level);
    const double h = mrm.mesh_h;
    std::vector<double> density(win.count);
    for (long i = 0; i < win.count; ++i)
        density[i] = std::exp(win.w[win.begin + i]);
    double acc = 0.0;
    for (long i = 0; i < win.count; ++i)
        acc += density[i] * density[i];
    for (long d = 1; d < win.count; ++d) {
        const double g = fgn_autocovariance(H, d);
        double cross = 0.0;
        for (long i = 0; i + d < win.count; ++i)
            cross += density[i] * density[i + d];
        acc += 2.0 * g * cross;
    }
    return std::sqrt(std::pow(h, 2.0 * H) * acc);
}

double conditional_covariance(const MrmRealization& mrm, double H, long j, long k1, long k2,
                              int at_level) {
    if (!(H > 0.5 && H < 1.0))
        throw InvalidH("conditional_covariance: H must be in (1/2, 1)");
    if (k1 == k2)
        throw Error("conditional_covariance: cells must differ");
    const auto w1 = fine_window(mrm, j, k1, at_level);
    const auto w2 = fine_window(mrm, j, k2, at_level);
    const double h = mrm.mesh_h;
    double acc = 0.0;
    for (long i = 0; i < w1.count; ++i) {
        const double di = std::exp(w1.w[w1.begin + i]);
        for (long i2 = 0; i2 < w2.count; ++i2) {
            const long d = std::labs((w2.begin + i2) - (w1.begin + i));
            acc += di * std::exp(w2.w[w2.begin + i2]) * fgn_autocovariance(H, d);
        }
    }
    return std::pow(h, 2.0 * H) * acc;
}

} // namespace mfrac
