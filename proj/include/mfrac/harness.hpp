#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfrac/estimators.hpp"
#include "mfrac/grid.hpp"
#include "mfrac/scaling.hpp"
#include "mfrac/stats.hpp"

namespace mfrac {

// Moment-condition gating is hard (a rejected config is an error): outside
// q_chi the estimator is provably inconsistent.
enum class Gate {
    Clt,         // the relevant theorem's condition (2q, 4q or q < q_chi)
    Consistency, // q < q_chi only
    None
};

struct Experiment {
    Process process = Process::Cascade;
    ScalingModel model = ScalingModel::log_normal(0.0);
    double H = 0.5; // MRW only
    int n = 8;
    double chi = 0.0;
    double T = 1.0;
    std::vector<double> q_list{2.0};
    long R = 200;
    std::uint64_t seed = 1;
    int oversample = 3;
    int depth_extra = 12;
    Gate gate = Gate::Clt;
};

// Aggregated validation: every violated inequality, one message per line.
// Empty when the experiment is admissible.
std::vector<std::string> validate_experiment(const Experiment& exp);

struct Summary {
    double mean = 0.0;
    double bias = 0.0;
    double variance = 0.0;
    double sd = 0.0;
    std::vector<double> standardized; // (x - mean)/sd
    double ks_stat = 0.0;
    double ks_pvalue = 0.0; // NaN when fewer than 50 samples
};

Summary summarize(std::span<const double> samples, double truth);

struct McReport {
    Process process = Process::Cascade;
    std::string model;
    double H = 0.5;
    int n = 0;
    double chi = 0.0;
    long L = 0;
    long R = 0;
    std::uint64_t seed = 0;
    std::vector<double> q_list;
    std::vector<double> truth;                // zeta per q
    std::vector<std::vector<double>> tilde;   // [q][R]
    std::vector<std::vector<double>> hat;     // [q][R]
    std::vector<Summary> tilde_summary;       // per q
    std::vector<Summary> hat_summary;         // per q
    std::vector<double> rate_exponent;        // theory r per q (NaN if ungated)
    // rate experiments:
    std::vector<int> n_list;
    std::vector<std::vector<double>> var_by_n; // [q][n_list]
    std::vector<double> rate_slope;            // fitted d log2 var / dn per q
    std::vector<double> rate_theory;           // -2r per q
    double wall_seconds = 0.0;
};

// R independent replications with disjoint seed streams; each replication
// samples one level past n and reports zeta_tilde / zeta_hat at level n.
// Deterministic given (config, seed) regardless of the thread count.
McReport run_replications(const Experiment& exp, int threads = 1);

// var(zeta_tilde) across the levels in n_list, with the fitted log2-variance
// slope and the theoretical -2r per q.
McReport rate_experiment(const Experiment& exp, const std::vector<int>& n_list, int threads = 1);

// Least-squares slope of log2(var) against n.
double rate_regression(const std::vector<int>& n_list, const std::vector<double>& variances);

enum class DecayKind { Mrm, MrwSigma };

struct CovarianceDecay {
    std::vector<long> k_list;
    std::vector<double> cov;      // normalized: 2^(n zeta(2q)) E[D_0 D_k]
    double fitted_exponent = 0.0; // -inf when the sequence is identically zero
    double theory_bound = 0.0;    // -(psi(2q) - 2 psi(q) + 1)
    bool degenerate = false;
    long R = 0;
};

// Covariance decay across dyadic lags of the scale-difference statistics
// D_{j,k,n,q} (MRM) or of the conditional-sigma differences U_{n,k}
// (MrwSigma, needs H > 1/2).
CovarianceDecay covariance_decay(const ScalingModel& model, DecayKind kind, double q, int n,
                                 const std::vector<long>& k_list, long R, std::uint64_t seed,
                                 int oversample = 3, double H = 0.65, int threads = 1);

} // namespace mfrac
