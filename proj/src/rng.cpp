#include "mfrac/rng.hpp"

#include <cmath>

namespace mfrac {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, key);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t master_seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = splitmix64(master_seed);
    for (std::uint64_t t : tags)
        h = splitmix64(h ^ t);
    return h;
}

RngStream::RngStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> tags) {
    key64_ = derive_key(master_seed, tags);
    key_ = {static_cast<std::uint32_t>(key64_), static_cast<std::uint32_t>(key64_ >> 32)};
}

void RngStream::refill() {
    buffer_ = philox10(counter_, key_);
    pos_ = 0;
    for (int i = 0; i < 4; ++i) {
        if (++counter_[i] != 0)
            break;
    }
}

std::uint32_t RngStream::next_u32() {
    if (pos_ >= 4)
        refill();
    return buffer_[pos_++];
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RngStream::uniform01() {
    // 53-bit mantissa, offset by half an ulp so the result is in (0,1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) { return a + (b - a) * uniform01(); }

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

void RngStream::fill_normal(std::span<double> out) {
    for (double& v : out)
        v = normal();
}

double RngStream::exponential() { return -std::log(uniform01()); }

long RngStream::poisson(double mean) {
    if (mean <= 0.0)
        return 0;
    if (mean > 30.0) {
        // Binary splitting keeps the product method's exponent in range.
        const double half = mean / 2.0;
        return poisson(half) + poisson(mean - half);
    }
    const double limit = std::exp(-mean);
    long k = 0;
    double prod = uniform01();
    while (prod > limit) {
        ++k;
        prod *= uniform01();
    }
    return k;
}

double RngStream::stable_standard(double alpha, double beta) {
    // Chambers-Mallows-Stuck. Valid for alpha != 1.
    const double half_pi = M_PI / 2.0;
    const double v = uniform(-half_pi, half_pi);
    const double w = exponential();
    const double tan_term = beta * std::tan(half_pi * alpha);
    const double b = std::atan(tan_term) / alpha;
    const double s = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * alpha));
    const double num = std::sin(alpha * (v + b));
    const double den = std::pow(std::cos(v), 1.0 / alpha);
    const double tail = std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
    return s * (num / den) * tail;
}

double RngStream::stable_positive(double alpha) {
    // beta=+1, alpha<1 gives a positive variable with
    // E[exp(-sX)] = exp(-s^alpha / cos(pi*alpha/2)); rescale to drop the cosine.
    const double x = stable_standard(alpha, 1.0);
    return x * std::pow(std::cos(M_PI * alpha / 2.0), 1.0 / alpha);
}

} // namespace mfrac
