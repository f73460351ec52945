#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfrac/errors.hpp"

namespace mfrac {

// The supported log-Laplace families. PoissonCascade carries the weight law W
// (discrete atoms or log-normal), used both as the compound-Poisson mark law
// (natural-log convention) and as the dyadic cascade weight (base-2 convention).
enum class Family { LogNormal, PoissonCascade, StableSub, StableSuper };

// Which logarithm the model's psi/zeta are taken in. Cascades (dyadic, base-2
// refinement) use Base2; MRM/MRW use Natural. For the log-normal family the
// lambda2 parameterization makes psi(q) = lambda2*q*(q-1)/2 in both
// conventions (the cascade weight is realized as W = exp(-s^2/2 + s Z) with
// s^2 = lambda2*ln 2, so log2 E[W^q] = lambda2*q*(q-1)/2 exactly).
enum class LogBase { Base2, Natural };

struct DiscreteW {
    std::vector<double> atoms;
    std::vector<double> probs;
};

class ScalingModel {
  public:
    static ScalingModel log_normal(double lambda2, LogBase base = LogBase::Natural);
    // Compound-Poisson / discrete-W cascade with a discrete weight law.
    static ScalingModel poisson_cascade(DiscreteW w, LogBase base = LogBase::Natural);
    // Compound-Poisson with a log-normal weight: W = exp(-s2/2 + sqrt(s2) Z).
    static ScalingModel poisson_cascade_lognormal_w(double s2, LogBase base = LogBase::Natural);
    static ScalingModel stable_sub(double alpha, double sigma);   // alpha in (0,1)
    static ScalingModel stable_super(double alpha, double sigma); // alpha in (1,2)

    Family family() const { return family_; }
    LogBase log_base() const { return base_; }
    double lambda2() const { return lambda2_; }
    double alpha() const { return alpha_; }
    double sigma() const { return sigma_; }
    double w_lognormal_s2() const { return w_s2_; }
    bool w_is_discrete() const { return !w_.atoms.empty(); }
    const DiscreteW& discrete_w() const { return w_; }
    std::string describe() const;

    // True when the family provides a drawable cascade weight W (log-normal or
    // a W-law); the stable families have no weight representation.
    bool has_weight_law() const;

    // E[W^q] and E[W^q ln W] for the weight law, in closed form.
    double weight_moment(double q) const;
    double weight_moment_dq(double q) const;
    // log E[W^q] (log-sum-exp for discrete laws, immune to overflow) and the
    // logarithmic derivative E[W^q ln W] / E[W^q].
    double weight_log_moment(double q) const;
    double weight_log_moment_dq(double q) const;

    bool q_in_domain(double q) const;

  private:
    ScalingModel() = default;
    void validate() const;

    Family family_ = Family::LogNormal;
    LogBase base_ = LogBase::Natural;
    double lambda2_ = 0.0; // LogNormal intermittency
    double alpha_ = 0.0;   // stable index
    double sigma_ = 0.0;   // stable scale
    double w_s2_ = 0.0;    // PoissonCascade log-normal W parameter
    DiscreteW w_;          // PoissonCascade discrete W
};

struct CriticalExponents {
    double q_max = 0.0; // sup{q : zeta(q) >= 1}; +inf possible
    double q_0 = 0.0;   // largest q with q psi'(q) - psi(q) < 1
    double q_chi = 0.0; // largest q with q psi'(q) - psi(q) < 1 + chi
    double chi = 0.0;
};

double psi(const ScalingModel& model, double q);
double psi_prime(const ScalingModel& model, double q);
double zeta(const ScalingModel& model, double q);

// zeta_H: qH - psi(q) for H > 1/2; zeta(q/2) for H = 1/2.
double zeta_h(const ScalingModel& model, double H, double q);

CriticalExponents critical_exponents(const ScalingModel& model, double chi);

// psi(p*q) - p*psi(q), the moment-gap of eq-style convexity bounds.
double moment_gap(const ScalingModel& model, double p, double q);

} // namespace mfrac
