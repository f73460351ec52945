#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace mfrac {

// Counter-based RNG (Philox4x32-10). A stream is identified by a master seed
// plus a list of tags (replication, block, purpose, ...); streams with
// different tags are independent and a stream's output never depends on which
// thread consumes it. This is the reproducibility contract: results are a pure
// function of (master seed, tags), not of scheduling.
namespace purpose {
inline constexpr std::uint64_t cascade_weights = 0x11;
inline constexpr std::uint64_t gauss_field = 0x22;
inline constexpr std::uint64_t poisson_points = 0x33;
inline constexpr std::uint64_t stable_cells = 0x44;
inline constexpr std::uint64_t fgn = 0x55;
inline constexpr std::uint64_t noise = 0x66;
inline constexpr std::uint64_t bootstrap = 0x77;
inline constexpr std::uint64_t variance_mc = 0x88;
} // namespace purpose

std::uint64_t splitmix64(std::uint64_t x);

class RngStream {
  public:
    RngStream() = default;
    explicit RngStream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> tags = {});

    // Returns the derived 64-bit key so sub-streams can be spawned cheaply.
    std::uint64_t key() const { return key64_; }

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform01();
    double uniform(double a, double b);

    // Standard normal via Box-Muller (second value cached).
    double normal();
    void fill_normal(std::span<double> out);

    double exponential(); // mean 1

    // Exact Poisson; product method for small means, binary splitting above.
    long poisson(double mean);

    // Standard alpha-stable, beta in {-1,+1}, Chambers-Mallows-Stuck, in the
    // S1 parameterization with unit scale and zero shift. alpha in (0,1)u(1,2).
    double stable_standard(double alpha, double beta);

    // Positive alpha-stable with Laplace transform E[exp(-s Y)] = exp(-s^alpha),
    // alpha in (0,1).
    double stable_positive(double alpha);

  private:
    void refill();

    std::uint64_t key64_ = 0;
    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 4> counter_{};
    std::array<std::uint32_t, 4> buffer_{};
    int pos_ = 4;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// Derives the stream key for (seed, tags...) without constructing a stream.
std::uint64_t derive_key(std::uint64_t master_seed, std::initializer_list<std::uint64_t> tags);

} // namespace mfrac
