#include "mfrac/cascade.hpp"

#include <cmath>

#include "mfrac/parallel.hpp"

namespace mfrac {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void check_cascade_model(const ScalingModel& model) {
    if (!model.has_weight_law())
        throw InvalidModel("cascade: model has no weight law: " + model.describe());
    if (model.log_base() != LogBase::Base2)
        throw InvalidModel("cascade: model must use the base-2 convention");
    // Non-degeneracy: E[W log2 W] < 1.
    const double wlog2w = model.weight_moment_dq(1.0) / kLn2;
    if (wlog2w >= 1.0)
        throw InvalidModel("cascade: E[W log2 W] = " + std::to_string(wlog2w) +
                           " >= 1, the limit measure degenerates");
}

// Draws log W without a per-node exp; the exp happens once per leaf.
class WeightDrawer {
  public:
    explicit WeightDrawer(const ScalingModel& model) : model_(&model) {
        if (model.family() == Family::LogNormal) {
            lognormal_ = true;
            const double s2 = model.lambda2() * kLn2;
            s_ = std::sqrt(s2);
            m_ = -0.5 * s2;
        } else if (model.w_is_discrete()) {
            const auto& w = model.discrete_w();
            log_atoms_.reserve(w.atoms.size());
            for (double a : w.atoms)
                log_atoms_.push_back(std::log(a));
        } else {
            lognormal_ = true;
            const double s2 = model.w_lognormal_s2();
            s_ = std::sqrt(s2);
            m_ = -0.5 * s2;
        }
    }

    double draw_log(RngStream& rng) const {
        if (lognormal_)
            return s_ == 0.0 ? 0.0 : m_ + s_ * rng.normal();
        const auto& w = model_->discrete_w();
        const double u = rng.uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < w.atoms.size(); ++i) {
            acc += w.probs[i];
            if (u < acc)
                return log_atoms_[i];
        }
        return log_atoms_.back();
    }

  private:
    const ScalingModel* model_;
    bool lognormal_ = false;
    double s_ = 0.0, m_ = 0.0;
    std::vector<double> log_atoms_;
};

// Expands `buf[0..width)` of partial log-products down `depth` more levels.
void expand_tree_log(std::vector<double>& buf, long width, int depth, const WeightDrawer& draw,
                     RngStream& rng) {
    for (int l = 0; l < depth; ++l) {
        for (long k = width - 1; k >= 0; --k) {
            const double a = buf[k];
            buf[2 * k] = a + draw.draw_log(rng);
            buf[2 * k + 1] = a + draw.draw_log(rng);
        }
        width <<= 1;
    }
}

double subcascade_mass(const WeightDrawer& draw, int depth, RngStream& rng,
                       std::vector<double>& scratch) {
    if (depth <= 0)
        return 1.0;
    const long leaves = 1L << depth;
    scratch.resize(leaves);
    scratch[0] = 0.0;
    expand_tree_log(scratch, 1, depth, draw, rng);
    double sum = 0.0;
    for (long k = 0; k < leaves; ++k)
        sum += std::exp(scratch[k]);
    return sum / static_cast<double>(leaves);
}

} // namespace

double draw_weight(const ScalingModel& model, RngStream& rng) {
    switch (model.family()) {
    case Family::LogNormal: {
        const double s2 = model.lambda2() * kLn2;
        if (s2 == 0.0)
            return 1.0;
        const double s = std::sqrt(s2);
        return std::exp(-0.5 * s2 + s * rng.normal());
    }
    case Family::PoissonCascade:
        if (model.w_is_discrete()) {
            const auto& w = model.discrete_w();
            const double u = rng.uniform01();
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < w.atoms.size(); ++i) {
                acc += w.probs[i];
                if (u < acc)
                    return w.atoms[i];
            }
            return w.atoms.back();
        } else {
            const double s2 = model.w_lognormal_s2();
            if (s2 == 0.0)
                return 1.0;
            return std::exp(-0.5 * s2 + std::sqrt(s2) * rng.normal());
        }
    default:
        throw InvalidModel("draw_weight: model has no weight law: " + model.describe());
    }
}

double truncated_cascade_mass(const ScalingModel& model, int depth, RngStream& rng) {
    thread_local std::vector<double> scratch;
    const WeightDrawer draw(model);
    return subcascade_mass(draw, depth, rng, scratch);
}

CascadeRealization sample_cascade(const ScalingModel& model, const MixedGrid& grid,
                                  int depth_extra, std::uint64_t seed, int level, int threads,
                                  std::uint64_t rep_tag) {
    check_cascade_model(model);
    if (depth_extra < 0)
        throw Error("sample_cascade: depth_extra must be >= 0");
    if (level < 0)
        level = grid.n;

    CascadeRealization out;
    out.depth_extra = depth_extra;
    out.data.grid = grid;
    out.data.level = level;
    out.data.kind = SeriesKind::Measure;
    out.data.seed = seed;
    const long npb = 1L << level;
    out.data.values.resize(grid.L * npb);
    const double leaf_scale = grid.T * std::exp2(-static_cast<double>(level));

    const WeightDrawer draw(model);
    parallel_for(grid.L, threads, [&](long j) {
        RngStream rng(seed, {rep_tag, static_cast<std::uint64_t>(j), purpose::cascade_weights});
        std::vector<double> logprods(npb);
        logprods[0] = 0.0;
        expand_tree_log(logprods, 1, level, draw, rng);
        std::vector<double> scratch;
        double* masses = out.data.values.data() + j * npb;
        for (long k = 0; k < npb; ++k) {
            const double z = subcascade_mass(draw, depth_extra, rng, scratch);
            masses[k] = leaf_scale * std::exp(logprods[k]) * z;
        }
    });
    return out;
}

VarianceEstimate theoretical_V(const ScalingModel& model, double q, long mc_samples,
                               std::uint64_t seed, int z_depth, int threads) {
    check_cascade_model(model);
    if (mc_samples < 10000)
        throw Error("theoretical_V: mc_samples must be >= 10^4");
    const double zq = zeta(model, q);
    const double coef = std::exp2(zq - 1.0 - q);

    std::vector<double> stat(mc_samples);
    parallel_for(mc_samples, threads, [&](long i) {
        RngStream rng(seed, {static_cast<std::uint64_t>(i), purpose::variance_mc});
        const double w1 = draw_weight(model, rng);
        const double w2 = draw_weight(model, rng);
        const double z1 = truncated_cascade_mass(model, z_depth, rng);
        const double z2 = truncated_cascade_mass(model, z_depth, rng);
        const double z0 = (z1 * w1 + z2 * w2) / 2.0;
        stat[i] = std::pow(z0, q) -
                  coef * (std::pow(z1, q) * std::pow(w1, q) + std::pow(z2, q) * std::pow(w2, q));
        if (!std::isfinite(stat[i]))
            throw NonFinite("theoretical_V: statistic overflowed at q = " + std::to_string(q));
    });

    double mean = 0.0;
    for (double x : stat)
        mean += x;
    mean /= static_cast<double>(mc_samples);
    double m2 = 0.0, m4 = 0.0;
    for (double x : stat) {
        const double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double n = static_cast<double>(mc_samples);
    VarianceEstimate est;
    est.samples = mc_samples;
    est.value = m2 / (n - 1.0);
    m2 /= n;
    m4 /= n;
    const double var_of_var = (m4 - m2 * m2) / n;
    est.std_error = var_of_var > 0.0 ? std::sqrt(var_of_var) : 0.0;
    return est;
}

} // namespace mfrac
