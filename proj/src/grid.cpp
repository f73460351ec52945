#include "mfrac/grid.hpp"

#include <cmath>

namespace mfrac {

MixedGrid MixedGrid::make(double T, int n, double chi) {
    if (!(T > 0.0))
        throw ValidationError("grid: T must be > 0");
    if (n < 1)
        throw ValidationError("grid: n must be >= 1");
    if (!(chi >= 0.0))
        throw ValidationError("grid: chi must be >= 0");
    MixedGrid g;
    g.T = T;
    g.n = n;
    g.chi = chi;
    // floor(2^(n chi)); the epsilon guards exact powers against rounding.
    g.L = static_cast<long>(std::floor(std::exp2(static_cast<double>(n) * chi) + 1e-9));
    if (g.L < 1)
        g.L = 1;
    g.delta = T * std::exp2(-static_cast<double>(n));
    return g;
}

Realization aggregate(const Realization& r, int levels_up) {
    if (levels_up < 0 || levels_up > r.level)
        throw Error("aggregate: levels_up must be in [0, level]");
    Realization out;
    out.grid = r.grid;
    out.kind = r.kind;
    out.seed = r.seed;
    out.level = r.level - levels_up;
    if (levels_up == 0) {
        out.values = r.values;
        return out;
    }
    // One level at a time so that aggregate(x, a+b) == aggregate(aggregate(x, a), b)
    // bit for bit (pairwise sums associate identically).
    out.values = r.values;
    long count = r.grid.L * r.per_block();
    for (int step = 0; step < levels_up; ++step) {
        count /= 2;
        for (long i = 0; i < count; ++i)
            out.values[i] = out.values[2 * i] + out.values[2 * i + 1];
    }
    out.values.resize(count);
    return out;
}

} // namespace mfrac
