#pragma once

#include <cstdint>
#include <vector>

#include "mfrac/errors.hpp"

namespace mfrac {

// Mixed-asymptotic observation layout: L = floor(2^(n*chi)) independent
// length-T intervals, each refined to dyadic mesh T*2^-n.
struct MixedGrid {
    double T = 1.0;
    int n = 1;
    double chi = 0.0;
    long L = 1;
    double delta = 0.5;

    static MixedGrid make(double T, int n, double chi);
};

enum class SeriesKind { Measure, Increments };

// Block-structured dyadic data: L blocks of 2^level values. `level` is the
// dyadic depth the values live at; it may exceed grid.n (samplers refine one
// level past the estimation scale so the ratio estimator can compare n, n+1).
struct Realization {
    MixedGrid grid;
    int level = 0;
    SeriesKind kind = SeriesKind::Measure;
    std::vector<double> values;
    std::uint64_t seed = 0;

    long per_block() const { return 1L << level; }
    double& at(long j, long k) { return values[j * per_block() + k]; }
    double at(long j, long k) const { return values[j * per_block() + k]; }
};

// Sums adjacent pairs levels_up times. Block structure is preserved and block
// totals are invariant (exact pairwise sums).
Realization aggregate(const Realization& r, int levels_up);

} // namespace mfrac
