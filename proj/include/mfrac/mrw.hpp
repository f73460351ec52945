#pragma once

#include <cstdint>
#include <vector>

#include "mfrac/mrm.hpp"

namespace mfrac {

// Exact stationary fractional Gaussian noise on a unit-spacing grid,
// autocovariance gamma(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H)/2, via circulant
// embedding of the padded autocovariance.
class FgnPlan {
  public:
    FgnPlan(double H, long count);
    long count() const { return count_; }
    void sample(RngStream& rng, std::vector<double>& out) const;

  private:
    double H_ = 0.5;
    long count_ = 0;
    CirculantSampler sampler_;
};

std::vector<double> sample_fgn(double H, long count, RngStream& rng);
double fgn_autocovariance(double H, long k);

struct MrwPath {
    Realization data; // increments at data.level
    double H = 0.5;
    MrmRealization mrm;
};

// Multifractal random walk increments on the mixed grid.
//   H = 1/2 : dX = sqrt(M(cell)) * N with N iid standard normal, independent
//             of the MRM.
//   H > 1/2 : Riemann-Stieltjes product construction on the shared fine mesh,
//             dX = sum of exp(w_l(u_i)) dB_H(u_i) over the cell, with the fGn
//             independent of the field.
// The sampler accepts H in [1/2, 1); CLT/rate verification is gated at
// H < 3/4 by the harness. For H > 1/2, requires H - psi(2)/2 > 1/2.
MrwPath sample_mrw(const ScalingModel& model, double H, const MixedGrid& grid, int oversample,
                   std::uint64_t seed, int level = -1, int threads = 1,
                   std::uint64_t rep_tag = 0);

// Conditional standard deviation a_{j,k} = E_M^(1/2)[(dX_{j,k})^2] for
// H > 1/2: Riemann approximation of (C_H Int Int |u-v|^(2H-2) M du M dv)^(1/2)
// over cell k at dyadic depth `at_level` (default: the realization's level),
// with the diagonal handled by the exact in-cell integral.
double conditional_sigma(const MrmRealization& mrm, double H, long j, long k, int at_level = -1);

// Same kernel between two distinct cells k1 != k2 (no diagonal term).
double conditional_covariance(const MrmRealization& mrm, double H, long j, long k1, long k2,
                              int at_level = -1);

} // namespace mfrac
