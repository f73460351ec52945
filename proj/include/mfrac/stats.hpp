#pragma once

#include <span>
#include <utility>
#include <vector>

namespace mfrac {

double normal_cdf(double x);

// E|N(0,1)|^q = 2^(q/2) Gamma((q+1)/2) / sqrt(pi), q > -1.
double normal_abs_moment(double q);

// P(K > lambda) for the Kolmogorov distribution, 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2),
// truncated when terms drop below 1e-10.
double kolmogorov_sf(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

// One-sample KS against the standard normal; samples are used as-is (the
// caller standardizes when appropriate). Throws TooFewSamples below 50.
KsResult ks_normal_test(std::span<const double> samples);

// Two-sample KS with the asymptotic p-value at effective size n1 n2/(n1+n2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

double mean_of(std::span<const double> xs);
double variance_of(std::span<const double> xs); // unbiased, n-1

} // namespace mfrac
