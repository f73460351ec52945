#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mfrac/circulant.hpp"
#include "mfrac/grid.hpp"
#include "mfrac/rng.hpp"
#include "mfrac/scaling.hpp"

namespace mfrac {

// Truncated cone A_l(u) = {(s,t): |s-u| < (t/2 ^ T/2), t > l} carrying the
// intensity t^-2 ds dt.
struct ConeGeometry {
    double T = 1.0;
    double l = 0.0;

    ConeGeometry(double T_, double l_);
    double mu() const; // mu(A_l(u)) = 1 + log(T/l)
};

// mu(A_l(u) n A_l(u+tau)) in closed form:
//   tau <= l      -> log(T/l) + 1 - tau/l
//   l < tau <= T  -> log(T/tau)
//   tau > T       -> 0
double cone_overlap(double T, double l, double tau);

struct ConePoint {
    double s = 0.0;
    double t = 0.0;
    double log_w = 0.0;
};

// Poisson(t^-2 ds dt) points with t > l and s in [s_lo, s_hi), marked with
// log W. Used by the compound-Poisson field and exposed for tests.
std::vector<ConePoint> sample_cone_points(const ScalingModel& model, const ConeGeometry& geom,
                                          double s_lo, double s_hi, RngStream& rng);

// Precomputed sampler for the field w_l(u_i) on the midpoint mesh
// u_i = (i+1/2) h, i = 0..mesh_count-1, h = T / mesh_count. The Gaussian
// family uses circulant embedding (dense Cholesky fallback below 2^13
// points), the compound-Poisson family an exact point process, and the
// stable families a cone-cell discretization (dyadic t-layers, mesh-width
// s-cells, one tail cell aggregating t > T).
class WlPlan {
  public:
    WlPlan(const ScalingModel& model, const ConeGeometry& geom, long mesh_count);

    const ConeGeometry& geometry() const { return geom_; }
    long mesh_count() const { return mesh_; }
    double mesh_h() const { return h_; }

    void sample(RngStream& rng, std::vector<double>& out) const;

  private:
    void sample_gaussian(RngStream& rng, std::vector<double>& out) const;
    void sample_poisson(RngStream& rng, std::vector<double>& out) const;
    void sample_stable(RngStream& rng, std::vector<double>& out) const;

    ScalingModel model_;
    ConeGeometry geom_;
    long mesh_ = 0;
    double h_ = 0.0;

    // Gaussian path
    std::shared_ptr<const CirculantSampler> circulant_;
    std::vector<std::vector<double>> chol_; // fallback factor, row-major lower
    double gauss_mean_ = 0.0;

    // Stable path
    struct StableLayer {
        double cell_mu = 0.0; // t^-2 measure of one cell
        long radius = 0;      // window half-width in cells
    };
    std::vector<StableLayer> layers_;
    long cell_lo_ = 0, cell_hi_ = 0; // s-cell index range
};

std::vector<double> sample_wl(const ScalingModel& model, const ConeGeometry& geom,
                              long mesh_count, RngStream& rng);

struct MrmRealization {
    Realization data; // masses at data.level
    int oversample = 3;
    double cutoff_l = 0.0;
    double mesh_h = 0.0;
    std::vector<double> field; // w_l on the fine mesh, L * (2^(level+oversample))
    long fine_per_block() const { return data.per_block() << oversample; }
};

// MRM masses on the mixed grid: per block, w_l is sampled on the fine mesh
// with l tied to it (l = T 2^-(level+g)) and masses are midpoint-rule sums
// of exp(w_l). Blocks are independent (disjoint streams).
MrmRealization sample_mrm(const ScalingModel& model, const MixedGrid& grid, int oversample,
                          std::uint64_t seed, int level = -1, int threads = 1,
                          std::uint64_t rep_tag = 0);

// Mean of values^q over all (j,k).
double empirical_moment(const Realization& r, double q);

// |x|^q with the structure-function conventions: q == 0 -> 1, q == 1 -> |x|,
// |x| < 1e-300 -> 0, otherwise exp(q log|x|).
double power_q(double x, double q);

} // namespace mfrac
