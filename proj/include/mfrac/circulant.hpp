#pragma once

#include <cstddef>
#include <vector>

#include "mfrac/rng.hpp"

namespace mfrac {

// Exact sampling of a stationary Gaussian vector on a regular grid by
// circulant embedding. `cov_half` holds the covariance at lags 0..m/2 (m the
// embedding size, a power of two); the circulant is mirrored from it.
// Eigenvalues must be >= -tol * max; small negatives are clamped to zero,
// larger ones raise EmbeddingFailure.
class CirculantSampler {
  public:
    CirculantSampler(std::vector<double> cov_half, double tol = 1e-9);

    std::size_t embedding_size() const { return m_; }
    double min_eigenvalue() const { return min_eig_; }

    // Fills `out` (size <= m) with consecutive samples of the field.
    void sample(RngStream& rng, std::vector<double>& out, std::size_t count) const;

  private:
    std::size_t m_ = 0;
    double min_eig_ = 0.0;
    std::vector<double> amp_; // sqrt(eigenvalue / m)
};

} // namespace mfrac
