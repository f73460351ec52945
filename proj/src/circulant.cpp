#include "mfrac/circulant.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "mfrac/errors.hpp"
#include "mfrac/fft.hpp"

namespace mfrac {

CirculantSampler::CirculantSampler(std::vector<double> cov_half, double tol) {
    if (cov_half.size() < 2)
        throw Error("circulant: need covariance at lags 0..m/2 with m >= 2");
    const std::size_t half = cov_half.size() - 1;
    m_ = 2 * half;
    if ((m_ & (m_ - 1)) != 0)
        throw Error("circulant: embedding size must be a power of two");

    std::vector<std::complex<double>> c(m_);
    for (std::size_t k = 0; k <= half; ++k)
        c[k] = cov_half[k];
    for (std::size_t k = half + 1; k < m_; ++k)
        c[k] = cov_half[m_ - k];
    fft_pow2(c, -1);

    double max_eig = 0.0;
    min_eig_ = 0.0;
    for (const auto& z : c) {
        max_eig = std::max(max_eig, z.real());
        min_eig_ = std::min(min_eig_, z.real());
    }
    const double cutoff = -tol * std::max(max_eig, 1.0);
    amp_.resize(m_);
    for (std::size_t k = 0; k < m_; ++k) {
        const double eig = c[k].real();
        if (eig < cutoff)
            throw EmbeddingFailure("circulant embedding is not nonnegative definite (min "
                                   "eigenvalue " +
                                   std::to_string(min_eig_) + ")");
        amp_[k] = std::sqrt(std::max(eig, 0.0) / static_cast<double>(m_));
    }
}

void CirculantSampler::sample(RngStream& rng, std::vector<double>& out, std::size_t count) const {
    if (count > m_)
        throw Error("circulant: requested more samples than the embedding holds");
    std::vector<std::complex<double>> a(m_);
    a[0] = amp_[0] * rng.normal();
    a[m_ / 2] = amp_[m_ / 2] * rng.normal();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t k = 1; k < m_ / 2; ++k) {
        const double re = rng.normal() * inv_sqrt2;
        const double im = rng.normal() * inv_sqrt2;
        a[k] = amp_[k] * std::complex<double>(re, im);
        a[m_ - k] = std::conj(a[k]);
    }
    fft_pow2(a, -1);
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = a[i].real();
}

} // namespace mfrac
