#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfrac/grid.hpp"
#include "mfrac/scaling.hpp"

namespace mfrac {

// Structure functions S_{L,m}(q) = sum_{j,k} |increment at level m|^q for the
// requested levels and q values. Each level is recomputed from aggregated
// increments of the underlying realization; rows are never chained from other
// rows. Row sums use pairwise summation, so for a measure the q=1 row is
// bit-identical across levels.
struct StructureTable {
    std::vector<double> q_list;
    std::vector<int> levels; // ascending
    std::vector<double> S;   // [level][q], row-major
    long L = 1;
    double chi = 0.0;
    int n = 0;

    double at(int level, double q) const;
    bool has_level(int level) const;
};

StructureTable structure_function(const Realization& r, const std::vector<double>& q_list,
                                  const std::vector<int>& levels);

// Ratio estimator: 1 + log2(S[m] / S[m+1]).
double zeta_tilde(const StructureTable& t, int level, double q);

// Chi-corrected log-scale estimator: 1 + log2(L)/m - log2(S[m])/m; its
// residual bias is log2(m(q))/m.
double zeta_hat(const StructureTable& t, int level, double q);

enum class Process { Cascade, Mrm, MrwHalf, MrwH };

Process process_from_string(const std::string& s);
std::string process_to_string(Process p);

// Rate exponent r such that 2^(n r) (zeta_tilde - zeta) is asymptotically
// normal, per process:
//   Cascade / MRM / MRW(H>1/2):  (1 + chi + 2 psi(q) - psi(2q)) / 2
//   MRW(H=1/2):                  chi/2 + psi(q/2) - psi(q)/2 + 1/2
// Throws ConditionViolated (naming the failed inequality) unless the
// corresponding theorem's moment condition holds: 2q < q_chi (cascade),
// 4q < q_chi (MRM, MRW H>1/2), q < q_chi (MRW H=1/2).
double asymptotic_rate(const ScalingModel& model, Process process, double q, double chi);

struct EstimateReport {
    std::vector<double> q_list;
    std::vector<double> zeta_tilde;
    std::vector<double> zeta_hat;
    std::vector<double> rate_exponent; // NaN when no model is attached
    std::vector<double> std_error;     // block bootstrap
    std::string method;                // "ratio" | "regression"
    int level_lo = 0, level_hi = 0;
    long bootstrap = 0;
};

enum class CurveMethod { Ratio, Regression };

// Batch wrapper: ratio method averages zeta_tilde over consecutive level
// pairs in [level_lo, level_hi]; regression fits log2 S vs level. Standard
// errors by bootstrap over blocks (the independent unit); a single-block
// series falls back to resampling coarsest-level chunks.
EstimateReport zeta_curve(const Realization& r, const std::vector<double>& q_list, int level_lo,
                          int level_hi, CurveMethod method, long bootstrap = 200,
                          std::uint64_t seed = 0);

} // namespace mfrac
