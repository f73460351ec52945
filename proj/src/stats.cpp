#include "mfrac/stats.hpp"

#include <algorithm>
#include <cmath>

#include "mfrac/errors.hpp"

namespace mfrac {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }

double normal_abs_moment(double q) {
    if (!(q > -1.0))
        throw DomainError("normal_abs_moment: q must be > -1");
    return std::exp2(q / 2.0) * std::tgamma((q + 1.0) / 2.0) / std::sqrt(M_PI);
}

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0)
        return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 1000; ++k) {
        const double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-10)
            break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_normal_test(std::span<const double> samples) {
    if (samples.size() < 50)
        throw TooFewSamples("ks_normal_test: need at least 50 samples, got " +
                            std::to_string(samples.size()));
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf(xs[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return {d, kolmogorov_sf(std::sqrt(n) * d)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw TooFewSamples("ks_two_sample: need at least 2 samples per side");
    std::vector<double> xs(a.begin(), a.end());
    std::vector<double> ys(b.begin(), b.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double na = static_cast<double>(xs.size());
    const double nb = static_cast<double>(ys.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        const double v = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] <= v)
            ++i;
        while (j < ys.size() && ys[j] <= v)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    return {d, kolmogorov_sf(std::sqrt(ne) * d)};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error("fit_line: need matching arrays with >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw Error("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double v : xs)
        s += v;
    return s / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
    if (xs.size() < 2)
        return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double v : xs)
        s += (v - m) * (v - m);
    return s / static_cast<double>(xs.size() - 1);
}

} // namespace mfrac
