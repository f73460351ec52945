#pragma once

#include <cstdint>

#include "mfrac/grid.hpp"
#include "mfrac/rng.hpp"
#include "mfrac/scaling.hpp"

namespace mfrac {

struct CascadeRealization {
    Realization data; // masses at dyadic depth data.level
    int depth_extra = 0;
};

// Draws one cascade weight from the model's weight law.
double draw_weight(const ScalingModel& model, RngStream& rng);

// Dyadic multiplicative cascade on the mixed grid. Masses are produced at
// dyadic depth `level` (defaults to grid.n; the estimation harness passes
// grid.n + 1). The limit measure is approximated by truncating the weight
// tree at depth level + depth_extra with uniform sub-leaf mass, i.e. the
// leaf factor Z is the total mass of a depth-(depth_extra) sub-cascade.
// Blocks use disjoint RNG streams keyed (seed, rep_tag, block, purpose) and
// may be sampled concurrently.
CascadeRealization sample_cascade(const ScalingModel& model, const MixedGrid& grid,
                                  int depth_extra, std::uint64_t seed, int level = -1,
                                  int threads = 1, std::uint64_t rep_tag = 0);

// Monte Carlo estimate of the CLT variance
//   V(q) = var(Z0^q - 2^(zeta(q)-1-q) (Z1^q W1^q + Z2^q W2^q)),
// Z1, Z2 independent deep-cascade total masses, Z0 = (Z1 W1 + Z2 W2)/2.
struct VarianceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long samples = 0;
};
VarianceEstimate theoretical_V(const ScalingModel& model, double q, long mc_samples,
                               std::uint64_t seed, int z_depth = 15, int threads = 1);

// Total mass of a depth-d truncated cascade (the Z factor).
double truncated_cascade_mass(const ScalingModel& model, int depth, RngStream& rng);

} // namespace mfrac
